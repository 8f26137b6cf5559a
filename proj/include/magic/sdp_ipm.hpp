#pragma once

// Primal-dual interior-point method on real cones
//
//   min <c, x>  s.t.  A x = b,  x in S^{n_1}_+ x ... x S^{n_k}_+ x R^l_+
//   max b'y     s.t.  A^T y + z = c,  z in the same cone,
//
// with Nesterov-Todd scaling and a Mehrotra predictor-corrector. Infeasible
// starts are allowed; the caller is responsible for handing over problems
// with linearly independent rows.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "jacobi.hpp"

namespace magic::sdp::detail {

using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Coefficients of every row restricted to one symmetric block, stored
/// column-wise as vec(A_i) so that the bulk products become GEMMs.
struct SdpBlockCoeffs {
  std::vector<int> rows;
  RMatrix cols;  // (n*n) x rows.size()
};

struct RealProblem {
  int m = 0;
  std::vector<int> sdp_dims;
  std::vector<SdpBlockCoeffs> sdp_coeffs;
  std::vector<RMatrix> c_sdp;
  int n_lp = 0;
  std::vector<std::vector<std::pair<int, double>>> lp_cols;  // per variable: (row, coeff)
  RVector c_lp;
  RVector b;

  int num_sdp() const { return static_cast<int>(sdp_dims.size()); }

  /// Register an SDP block coefficient for `row`; columns appended in row order.
  void finalize_block(int j, const std::vector<std::pair<int, RMatrix>>& entries) {
    const int n = sdp_dims[j];
    SdpBlockCoeffs& bc = sdp_coeffs[j];
    bc.rows.clear();
    bc.cols.resize(n * n, static_cast<Eigen::Index>(entries.size()));
    for (std::size_t k = 0; k < entries.size(); ++k) {
      bc.rows.push_back(entries[k].first);
      bc.cols.col(static_cast<Eigen::Index>(k)) =
          Eigen::Map<const RVector>(entries[k].second.data(), n * n);
    }
  }
};

struct Iterate {
  std::vector<RMatrix> X, Z;
  RVector x, z, y;
};

struct IpmResult {
  Iterate it;
  int iterations = 0;
  bool converged = false;
  bool diverged = false;
  double pinf = 0, dinf = 0, gap = 0, pobj = 0, dobj = 0;
  double primal_residual = 0, dual_residual = 0;  // absolute max-norms
  std::string message;
};

struct IpmOptions {
  int max_iterations = 200;
  double tolerance = 1e-10;
};

inline RVector apply_a(const RealProblem& p, const std::vector<RMatrix>& X, const RVector& x) {
  RVector out = RVector::Zero(p.m);
  for (int j = 0; j < p.num_sdp(); ++j) {
    const auto& bc = p.sdp_coeffs[j];
    if (bc.rows.empty()) continue;
    const Eigen::Map<const RVector> vx(X[j].data(), X[j].size());
    const RVector t = bc.cols.transpose() * vx;
    for (std::size_t k = 0; k < bc.rows.size(); ++k) out(bc.rows[k]) += t(Eigen::Index(k));
  }
  for (int k = 0; k < p.n_lp; ++k)
    for (const auto& [r, a] : p.lp_cols[k]) out(r) += a * x(k);
  return out;
}

inline void apply_at(const RealProblem& p, const RVector& y, std::vector<RMatrix>& Y,
                     RVector& yl) {
  Y.resize(p.sdp_dims.size());
  for (int j = 0; j < p.num_sdp(); ++j) {
    const int n = p.sdp_dims[j];
    const auto& bc = p.sdp_coeffs[j];
    RVector ys(static_cast<Eigen::Index>(bc.rows.size()));
    for (std::size_t k = 0; k < bc.rows.size(); ++k) ys(Eigen::Index(k)) = y(bc.rows[k]);
    RVector v = bc.rows.empty() ? RVector(RVector::Zero(n * n)) : RVector(bc.cols * ys);
    Y[j] = Eigen::Map<RMatrix>(v.data(), n, n);
  }
  yl = RVector::Zero(p.n_lp);
  for (int k = 0; k < p.n_lp; ++k)
    for (const auto& [r, a] : p.lp_cols[k]) yl(k) += a * y(r);
}

inline RMatrix sym(const RMatrix& m) { return (m + m.transpose()) / 2.0; }

/// Largest alpha in (0, inf] with X + alpha dX PSD, given the Cholesky
/// factor of X.
inline double max_step_sdp(const Eigen::LLT<RMatrix>& chol, const RMatrix& dX) {
  const auto& L = chol.matrixL();
  RMatrix t = L.solve(dX);
  t = L.solve(t.transpose()).transpose();
  const double lmin = jacobi_eigen(sym(t)).min();
  return lmin < 0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

inline double max_step_lp(const RVector& x, const RVector& dx) {
  double a = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < x.size(); ++k)
    if (dx(k) < 0) a = std::min(a, -x(k) / dx(k));
  return a;
}

struct NtScaling {
  RMatrix W;     // W Z W = X
  RMatrix G;     // G X G^T = Lambda
  RMatrix Ginv;  // G^{-1}
  RVector lambda;
};

inline bool nt_scaling(const RMatrix& X, const RMatrix& Z, NtScaling& s) {
  Eigen::LLT<RMatrix> cx(X);
  if (cx.info() != Eigen::Success) return false;
  const RMatrix L = cx.matrixL();
  const RMatrix M = sym(L.transpose() * Z * L);
  const auto spec = jacobi_eigen(M);
  const Eigen::Index n = X.rows();
  if (spec.min() <= 0) return false;
  RVector sig = spec.eigenvalues.cwiseSqrt();
  RVector isq = sig.cwiseSqrt().cwiseInverse();
  s.lambda = sig;
  s.Ginv = L * spec.eigenvectors * isq.asDiagonal();
  const RMatrix Linv = cx.matrixL().solve(RMatrix::Identity(n, n));
  s.G = sig.cwiseSqrt().asDiagonal() * spec.eigenvectors.transpose() * Linv;
  s.W = sym(s.Ginv * s.Ginv.transpose());
  return true;
}

inline double inner(const RMatrix& a, const RMatrix& b) { return a.cwiseProduct(b).sum(); }

inline IpmResult run_ipm(const RealProblem& p, const IpmOptions& opt) {
  const int nb = p.num_sdp();
  const int m = p.m;
  double nu = p.n_lp;
  for (int n : p.sdp_dims) nu += n;

  // Starting point: scaled identities, following the usual infeasible-start
  // heuristic based on the norms of the data.
  Iterate it;
  it.X.resize(nb);
  it.Z.resize(nb);
  it.y = RVector::Zero(m);
  for (int j = 0; j < nb; ++j) {
    const int n = p.sdp_dims[j];
    const auto& bc = p.sdp_coeffs[j];
    double xi = std::max(10.0, std::sqrt(double(n)));
    double eta = std::max({10.0, std::sqrt(double(n)), p.c_sdp[j].norm()});
    for (std::size_t k = 0; k < bc.rows.size(); ++k) {
      const double an = bc.cols.col(Eigen::Index(k)).norm();
      xi = std::max(xi, n * (1.0 + std::abs(p.b(bc.rows[k]))) / (1.0 + an));
      eta = std::max(eta, an);
    }
    it.X[j] = xi * RMatrix::Identity(n, n);
    it.Z[j] = eta * RMatrix::Identity(n, n);
  }
  it.x = RVector::Zero(p.n_lp);
  it.z = RVector::Zero(p.n_lp);
  if (p.n_lp > 0) {
    double xi = 10.0, eta = std::max(10.0, p.c_lp.lpNorm<Eigen::Infinity>());
    for (int k = 0; k < p.n_lp; ++k)
      for (const auto& [r, a] : p.lp_cols[k]) {
        xi = std::max(xi, (1.0 + std::abs(p.b(r))) / (1.0 + std::abs(a)));
        eta = std::max(eta, std::abs(a));
      }
    it.x.setConstant(xi);
    it.z.setConstant(eta);
  }

  const double bnorm = p.b.norm();
  double cnorm = p.c_lp.norm();
  for (const auto& c : p.c_sdp) cnorm = std::hypot(cnorm, c.norm());

  IpmResult res;
  std::vector<RMatrix> AtY;
  RVector aty;
  std::vector<NtScaling> scal(static_cast<std::size_t>(nb));
  std::vector<Eigen::LLT<RMatrix>> cholX(static_cast<std::size_t>(nb)),
      cholZ(static_cast<std::size_t>(nb));

  int stall = 0;
  for (int iter = 0; iter <= opt.max_iterations; ++iter) {
    // Residuals and measures.
    const RVector rp = p.b - apply_a(p, it.X, it.x);
    apply_at(p, it.y, AtY, aty);
    std::vector<RMatrix> Rd(static_cast<std::size_t>(nb));
    double rdn2 = 0, rdmax = 0;
    double pobj = 0, xz = 0;
    for (int j = 0; j < nb; ++j) {
      Rd[j] = p.c_sdp[j] - AtY[j] - it.Z[j];
      rdn2 += Rd[j].squaredNorm();
      rdmax = std::max(rdmax, Rd[j].cwiseAbs().maxCoeff());
      pobj += inner(p.c_sdp[j], it.X[j]);
      xz += inner(it.X[j], it.Z[j]);
    }
    RVector rd = p.c_lp - aty - it.z;
    rdn2 += rd.squaredNorm();
    if (rd.size()) rdmax = std::max(rdmax, rd.cwiseAbs().maxCoeff());
    pobj += p.c_lp.dot(it.x);
    xz += it.x.dot(it.z);
    const double dobj = p.b.dot(it.y);
    const double mu = xz / nu;

    res.pinf = rp.norm() / (1.0 + bnorm);
    res.dinf = std::sqrt(rdn2) / (1.0 + cnorm);
    res.gap = std::max(std::abs(pobj - dobj), xz) / (1.0 + std::abs(pobj) + std::abs(dobj));
    res.pobj = pobj;
    res.dobj = dobj;
    res.primal_residual = rp.size() ? rp.cwiseAbs().maxCoeff() : 0.0;
    res.dual_residual = rdmax;
    res.iterations = iter;
    res.it = it;

    if (res.pinf < opt.tolerance && res.dinf < opt.tolerance && res.gap < opt.tolerance) {
      res.converged = true;
      res.message = "converged";
      return res;
    }
    if (iter == opt.max_iterations) {
      res.message = "iteration cap reached";
      return res;
    }
    double xnorm = it.x.size() ? it.x.cwiseAbs().maxCoeff() : 0.0;
    for (const auto& X : it.X) xnorm = std::max(xnorm, X.cwiseAbs().maxCoeff());
    const double ynorm = it.y.size() ? it.y.cwiseAbs().maxCoeff() : 0.0;
    if (xnorm > 1e12 || ynorm > 1e12) {
      res.diverged = true;
      res.message = "iterates diverged";
      return res;
    }

    // Scaling.
    for (int j = 0; j < nb; ++j) {
      if (!nt_scaling(it.X[j], it.Z[j], scal[j])) {
        res.message = "lost positive definiteness";
        return res;
      }
    }
    const RVector wlp = it.x.cwiseQuotient(it.z);

    // Schur complement M_ij = sum <A_i, W A_j W> + sum_k w_k a_ik a_jk.
    RMatrix M = RMatrix::Zero(m, m);
    for (int j = 0; j < nb; ++j) {
      const auto& bc = p.sdp_coeffs[j];
      if (bc.rows.empty()) continue;
      const int n = p.sdp_dims[j];
      const RMatrix& W = scal[j].W;
      RMatrix G(n * n, bc.cols.cols());
      for (Eigen::Index k = 0; k < bc.cols.cols(); ++k) {
        const Eigen::Map<const RMatrix> A(bc.cols.col(k).data(), n, n);
        RMatrix t = W * A * W;
        G.col(k) = Eigen::Map<const RVector>(t.data(), n * n);
      }
      const RMatrix local = bc.cols.transpose() * G;
      for (std::size_t a = 0; a < bc.rows.size(); ++a)
        for (std::size_t c = 0; c < bc.rows.size(); ++c)
          M(bc.rows[a], bc.rows[c]) += local(Eigen::Index(a), Eigen::Index(c));
    }
    for (int k = 0; k < p.n_lp; ++k) {
      const auto& col = p.lp_cols[k];
      for (const auto& [r1, a1] : col)
        for (const auto& [r2, a2] : col) M(r1, r2) += wlp(k) * a1 * a2;
    }
    M = sym(M);

    Eigen::LLT<RMatrix> chol;
    {
      double reg = 0.0;
      const double dmax = std::max(M.diagonal().cwiseAbs().maxCoeff(), 1e-300);
      for (int attempt = 0; attempt < 6; ++attempt) {
        chol.compute(reg > 0 ? RMatrix(M + reg * RMatrix::Identity(m, m)) : M);
        if (chol.info() == Eigen::Success) break;
        reg = reg == 0 ? 1e-14 * dmax : reg * 100;
      }
      if (chol.info() != Eigen::Success) {
        res.message = "Schur complement is not positive definite";
        return res;
      }
    }
    auto solve_m = [&](const RVector& rhs) {
      RVector dy = chol.solve(rhs);
      for (int refine = 0; refine < 2; ++refine) dy += chol.solve(rhs - M * dy);
      return dy;
    };

    // Given complementarity targets Rc (for dX + W dZ W = Rc) compute the
    // full direction.
    auto direction = [&](const std::vector<RMatrix>& Rc, const RVector& rc,
                         std::vector<RMatrix>& dX, std::vector<RMatrix>& dZ, RVector& dx,
                         RVector& dz, RVector& dy) {
      std::vector<RMatrix> T(static_cast<std::size_t>(nb));
      for (int j = 0; j < nb; ++j) T[j] = Rc[j] - scal[j].W * Rd[j] * scal[j].W;
      const RVector tl = rc - wlp.cwiseProduct(rd);
      dy = solve_m(rp - apply_a(p, T, tl));
      std::vector<RMatrix> Ady;
      RVector ady;
      apply_at(p, dy, Ady, ady);
      dZ.resize(nb);
      dX.resize(nb);
      for (int j = 0; j < nb; ++j) {
        dZ[j] = sym(Rd[j] - Ady[j]);
        dX[j] = sym(Rc[j] - scal[j].W * dZ[j] * scal[j].W);
      }
      dz = rd - ady;
      dx = rc - wlp.cwiseProduct(dz);
    };

    for (int j = 0; j < nb; ++j) {
      cholX[j].compute(it.X[j]);
      cholZ[j].compute(it.Z[j]);
    }
    auto step_lengths = [&](const std::vector<RMatrix>& dX, const std::vector<RMatrix>& dZ,
                            const RVector& dx, const RVector& dz) {
      double ap = max_step_lp(it.x, dx), ad = max_step_lp(it.z, dz);
      for (int j = 0; j < nb; ++j) {
        ap = std::min(ap, max_step_sdp(cholX[j], dX[j]));
        ad = std::min(ad, max_step_sdp(cholZ[j], dZ[j]));
      }
      return std::pair<double, double>{ap, ad};
    };

    // Predictor.
    std::vector<RMatrix> Rc(static_cast<std::size_t>(nb));
    for (int j = 0; j < nb; ++j) Rc[j] = -it.X[j];
    RVector rc = -it.x;
    std::vector<RMatrix> dXa, dZa;
    RVector dxa, dza, dya;
    direction(Rc, rc, dXa, dZa, dxa, dza, dya);
    auto [apa, ada] = step_lengths(dXa, dZa, dxa, dza);
    apa = std::min(1.0, apa);
    ada = std::min(1.0, ada);
    double mu_aff = 0;
    for (int j = 0; j < nb; ++j) mu_aff += inner(it.X[j] + apa * dXa[j], it.Z[j] + ada * dZa[j]);
    mu_aff += (it.x + apa * dxa).dot(it.z + ada * dza);
    mu_aff /= nu;
    double sigma = std::pow(std::max(0.0, mu_aff) / mu, 3);
    sigma = std::clamp(sigma, 0.0, 1.0);

    // Corrector with the second-order term in the scaled space.
    for (int j = 0; j < nb; ++j) {
      const auto& s = scal[j];
      const Eigen::Index n = s.lambda.size();
      const RMatrix dXh = s.G * dXa[j] * s.G.transpose();
      const RMatrix dZh = s.Ginv.transpose() * dZa[j] * s.Ginv;
      RMatrix Rh = -(dXh * dZh + dZh * dXh);
      for (Eigen::Index i = 0; i < n; ++i) Rh(i, i) += 2.0 * (sigma * mu - s.lambda(i) * s.lambda(i));
      for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index c = 0; c < n; ++c) Rh(a, c) /= (s.lambda(a) + s.lambda(c));
      Rc[j] = sym(s.Ginv * Rh * s.Ginv.transpose());
    }
    rc = (RVector::Constant(p.n_lp, sigma * mu) - it.x.cwiseProduct(it.z) -
          dxa.cwiseProduct(dza))
             .cwiseQuotient(it.z);
    std::vector<RMatrix> dX, dZ;
    RVector dx, dz, dy;
    direction(Rc, rc, dX, dZ, dx, dz, dy);
    auto [ap, ad] = step_lengths(dX, dZ, dx, dz);
    const double gamma = 0.9 + 0.09 * std::min(apa, ada);
    ap = std::min(1.0, gamma * ap);
    ad = std::min(1.0, gamma * ad);

    if (ap < 1e-12 && ad < 1e-12) {
      if (++stall > 3) {
        res.message = "step length collapsed";
        return res;
      }
    } else {
      stall = 0;
    }

    for (int j = 0; j < nb; ++j) {
      it.X[j] = sym(it.X[j] + ap * dX[j]);
      it.Z[j] = sym(it.Z[j] + ad * dZ[j]);
    }
    it.x += ap * dx;
    it.z += ad * dz;
    it.y += ad * dy;
  }
  return res;
}

}  // namespace magic::sdp::detail
