#pragma once

// The min-entropy quantity q(X) = min{tr S : I (x) S >= X}, the operator
// Omega_rho(sigma, t, p) and the monotone family M_{sigma,t}.
//
// Omega lives on output (x) input like a Choi matrix:
//   Omega = N (sigma (x) rho^T + t sum_i p_i K_i),  N = 1 / (t d' + t + 1),
//   K_i = sum_b Pi'_{b, v_b} (x) Pi_{a,u}^T  for i = (v, a, u).

#include <cstring>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "sdp.hpp"
#include "stabilizer.hpp"

namespace magic {

/// Flat enumeration of the triples (v, a, u): v in Z_{d'}^{d'+1} in
/// lexicographic order (most significant), then input basis a, then u.
class TripleIndex {
 public:
  TripleIndex(int dim_out, int dim_in) : v_(dim_out), dim_in_(dim_in) {
    count_ = v_.count() * std::size_t(dim_in) * std::size_t(dim_in + 1);
  }
  std::size_t count() const { return count_; }
  int dim_out() const { return v_.dim(); }
  int dim_in() const { return dim_in_; }
  const PhasePointIndex& v_index() const { return v_; }

  struct Triple {
    std::vector<int> v;
    int a;
    int u;
  };
  Triple decode(std::size_t flat) const {
    const int u = int(flat % std::size_t(dim_in_));
    flat /= std::size_t(dim_in_);
    const int a = int(flat % std::size_t(dim_in_ + 1));
    flat /= std::size_t(dim_in_ + 1);
    return {v_.decode(flat), a, u};
  }
  std::size_t encode(const std::vector<int>& v, int a, int u) const {
    return (v_.encode(v) * std::size_t(dim_in_ + 1) + std::size_t(a)) * std::size_t(dim_in_) +
           std::size_t(u);
  }

 private:
  PhasePointIndex v_;
  int dim_in_;
  std::size_t count_;
};

/// Index sets beyond this size are rejected by the SDP builders.
inline constexpr std::size_t kMaxTriples = 20000;

inline TripleIndex checked_triples(int dim_out, int dim_in, const char* who) {
  require_prime(dim_out, who);
  require_prime(dim_in, who);
  const PhasePointIndex pv(dim_out);
  if (pv.count() * std::size_t(dim_in) * std::size_t(dim_in + 1) > kMaxTriples) {
    throw InvariantViolation(std::string(who) + ": index set of size d'^(d'+1) d(d+1) exceeds " +
                             std::to_string(kMaxTriples));
  }
  return TripleIndex(dim_out, dim_in);
}

/// K_i = sum_b Pi'_{b,v_b} (x) Pi_{a,u}^T.
inline CMatrix omega_term(const MubSet& out, const MubSet& in, const TripleIndex::Triple& t) {
  CMatrix left = CMatrix::Zero(out.dim(), out.dim());
  for (int b = 0; b <= out.dim(); ++b) left += out.projector(b, t.v[b]);
  return kron(left, CMatrix(in.projector(t.a, t.u).transpose()));
}

struct OmegaParams {
  DensityMatrix sigma;    // on the output space, dimension d'
  double t = 0.0;
  std::vector<double> p;  // over TripleIndex(d', d)

  void validate(int dim_in) const {
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvariantViolation("OmegaParams: t must be >= 0");
    const TripleIndex idx(sigma.dim(), dim_in);
    if (p.size() != idx.count()) {
      throw DimensionMismatch("OmegaParams: p has " + std::to_string(p.size()) +
                              " entries, expected " + std::to_string(idx.count()));
    }
    double s = 0.0;
    for (double x : p) {
      if (x < 0.0) throw InvariantViolation("OmegaParams: negative probability");
      s += x;
    }
    if (std::abs(s - 1.0) > 1e-10) {
      throw InvariantViolation("OmegaParams: probabilities sum to " + std::to_string(s));
    }
  }
};

inline double omega_normalization(double t, int dim_out) { return 1.0 / (t * dim_out + t + 1.0); }

inline DensityMatrix build_omega(const DensityMatrix& rho, const OmegaParams& params) {
  params.validate(rho.dim());
  const int dout = params.sigma.dim();
  const MubSet& out = mub_set(dout);
  const MubSet& in = mub_set(rho.dim());
  const TripleIndex idx(dout, rho.dim());
  CMatrix w = kron(params.sigma.matrix(), CMatrix(rho.matrix().transpose()));
  for (std::size_t i = 0; i < idx.count(); ++i) {
    if (params.p[i] == 0.0) continue;
    w += params.t * params.p[i] * omega_term(out, in, idx.decode(i));
  }
  w *= omega_normalization(params.t, dout);
  return DensityMatrix(Hermitian::symmetrize(w));
}

// ---------------------------------------------------------------------------
// q(X)

struct QResult {
  double value = 0.0;
  Hermitian s;
  sdp::SdpSolution solution;
};

/// Equality rows expressing  I_A (x) S - Z = rhs  over a Hermitian basis of
/// A (x) B; Z >= 0 is the slack block.
inline void add_operator_inequality(sdp::SdpProblem& p, std::size_t s_block, std::size_t z_block,
                                    int dim_a, int dim_b,
                                    const std::vector<std::vector<double>>& extra_coeffs,
                                    std::size_t extra_block, const CMatrix& rhs) {
  const auto basis = hermitian_basis(dim_a * dim_b);
  for (std::size_t r = 0; r < basis.size(); ++r) {
    const CMatrix& e = basis[r];
    sdp::LinearFunctional f;
    f.add(s_block, partial_trace(e, dim_a, dim_b, Keep::B));
    f.add(z_block, -e);
    if (!extra_coeffs.empty()) {
      const auto& row = extra_coeffs[r];
      for (std::size_t k = 0; k < row.size(); ++k)
        if (row[k] != 0.0) f.add(extra_block, int(k), row[k]);
    }
    p.add_equality(std::move(f), hs_inner(e, rhs));
  }
}

inline QResult q_min_entropy(const CMatrix& x, int dim_a, int dim_b,
                             const sdp::SolverOptions& opt = {}) {
  if (x.rows() != Eigen::Index(dim_a) * dim_b || x.cols() != x.rows()) {
    throw DimensionMismatch("q_min_entropy: operator does not match dims");
  }
  const Hermitian h(x, 1e-9);
  if (min_eigenvalue(h.matrix()) < -1e-9) {
    throw InvariantViolation("q_min_entropy: operator is not positive semidefinite");
  }
  if (max_abs(h.matrix()) == 0.0) throw InvariantViolation("q_min_entropy: zero operator");
  sdp::SdpProblem p;
  const auto s = p.add_psd_block(dim_b);
  const auto z = p.add_psd_block(dim_a * dim_b);
  add_operator_inequality(p, s, z, dim_a, dim_b, {}, 0, h.matrix());
  p.set_objective(sdp::LinearFunctional().add(s, CMatrix::Identity(dim_b, dim_b)));
  QResult r;
  r.solution = sdp::solve(p, opt);
  if (r.solution.status != sdp::Status::Optimal) {
    throw NumericalFailure("q_min_entropy: solver returned " +
                           std::string(sdp::to_string(r.solution.status)) + " (" +
                           r.solution.message + ")");
  }
  r.value = r.solution.objective;
  r.s = Hermitian::symmetrize(r.solution.primal[s].psd);
  const CMatrix gap = kron(CMatrix::Identity(dim_a, dim_a), r.s.matrix()) - h.matrix();
  if (min_eigenvalue(gap) < -1e-8) {
    throw NumericalFailure("q_min_entropy: optimal S fails I (x) S >= X");
  }
  return r;
}

// ---------------------------------------------------------------------------
// M_{sigma,t}

struct MonotoneResult {
  double value = 0.0;       // q_value - c_constant
  double q_value = 0.0;     // min over p of q(Omega_rho(p))
  double c_constant = 0.0;  // the same minimum at rho = I/d
  std::vector<double> optimal_p;
  Hermitian optimal_s;
};

namespace detail {

struct JointResult {
  double value;
  std::vector<double> p;
  Hermitian s;
};

/// min over S >= 0, p in the simplex of tr S subject to
/// I' (x) S >= Omega_rho(sigma, t, p); linear in (S, p) jointly.
inline JointResult joint_min(const DensityMatrix& sigma, double t, const CMatrix& rho,
                             const sdp::SolverOptions& opt) {
  const int dout = sigma.dim();
  const int din = static_cast<int>(rho.rows());
  const TripleIndex idx = checked_triples(dout, din, "monotone");
  const MubSet& out = mub_set(dout);
  const MubSet& in = mub_set(din);
  const double n = omega_normalization(t, dout);
  const auto basis = hermitian_basis(dout * din);

  // tr(E (Pi'_{b,w} (x) Pi_{a,u}^T)) for every basis element E.
  const int nb = dout + 1, nw = dout, na = din + 1, nu = din;
  auto flat = [&](int b, int w, int a, int u) {
    return std::size_t(((b * nw + w) * na + a) * nu + u);
  };
  std::vector<std::vector<double>> coeff(basis.size(), std::vector<double>(idx.count(), 0.0));
  if (t > 0.0) {
    std::vector<CMatrix> terms(std::size_t(nb * nw * na * nu));
    for (int b = 0; b < nb; ++b)
      for (int w = 0; w < nw; ++w)
        for (int a = 0; a < na; ++a)
          for (int u = 0; u < nu; ++u)
            terms[flat(b, w, a, u)] =
                kron(out.projector(b, w), CMatrix(in.projector(a, u).transpose()));
    std::vector<double> prod(terms.size());
    for (std::size_t r = 0; r < basis.size(); ++r) {
      for (std::size_t k = 0; k < terms.size(); ++k) prod[k] = hs_inner(basis[r], terms[k]);
      for (std::size_t i = 0; i < idx.count(); ++i) {
        const auto tr = idx.decode(i);
        double s = 0.0;
        for (int b = 0; b < nb; ++b) s += prod[flat(b, tr.v[b], tr.a, tr.u)];
        coeff[r][i] = -n * t * s;
      }
    }
  }
  sdp::SdpProblem p;
  const auto s_blk = p.add_psd_block(din);
  const auto p_blk = p.add_nonneg_block(int(idx.count()));
  const auto z_blk = p.add_psd_block(dout * din);
  const CMatrix rhs = n * kron(sigma.matrix(), CMatrix(rho.transpose()));
  add_operator_inequality(p, s_blk, z_blk, dout, din, coeff, p_blk, rhs);
  sdp::LinearFunctional sum;
  for (std::size_t i = 0; i < idx.count(); ++i) sum.add(p_blk, int(i), 1.0);
  p.add_equality(std::move(sum), 1.0);
  p.set_objective(sdp::LinearFunctional().add(s_blk, CMatrix::Identity(din, din)));

  const sdp::SdpSolution sol = sdp::solve(p, opt);
  if (sol.status != sdp::Status::Optimal) {
    throw NumericalFailure("monotone: solver returned " + std::string(sdp::to_string(sol.status)) +
                           " (" + sol.message + ")");
  }
  JointResult r;
  r.value = sol.objective;
  r.p.assign(sol.primal[p_blk].scalars.data(),
             sol.primal[p_blk].scalars.data() + sol.primal[p_blk].scalars.size());
  r.s = Hermitian::symmetrize(sol.primal[s_blk].psd);
  return r;
}

inline std::string cache_key(const DensityMatrix& sigma, double t, int dim_in) {
  std::string key(reinterpret_cast<const char*>(&t), sizeof t);
  key.append(reinterpret_cast<const char*>(&dim_in), sizeof dim_in);
  const CMatrix& m = sigma.matrix();
  key.append(reinterpret_cast<const char*>(m.data()), sizeof(Complex) * std::size_t(m.size()));
  return key;
}

}  // namespace detail

/// c_{sigma,t}: the joint minimum at the maximally mixed input state, cached
/// per (sigma, t, d).
inline double monotone_offset(const DensityMatrix& sigma, double t, int dim_in,
                              const sdp::SolverOptions& opt = {}) {
  static std::mutex mutex;
  static std::map<std::string, double> cache;
  const std::string key = detail::cache_key(sigma, t, dim_in);
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const CMatrix mixed = CMatrix::Identity(dim_in, dim_in) / double(dim_in);
  const double c = detail::joint_min(sigma, t, mixed, opt).value;
  std::lock_guard<std::mutex> lock(mutex);
  cache.emplace(key, c);
  return c;
}

inline MonotoneResult monotone(const DensityMatrix& sigma, double t, const DensityMatrix& rho,
                               const sdp::SolverOptions& opt = {}) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvariantViolation("monotone: t must be >= 0");
  const detail::JointResult j = detail::joint_min(sigma, t, rho.matrix(), opt);
  MonotoneResult r;
  r.q_value = j.value;
  r.c_constant = monotone_offset(sigma, t, rho.dim(), opt);
  r.value = r.q_value - r.c_constant;
  r.optimal_p = j.p;
  r.optimal_s = j.s;
  return r;
}

// ---------------------------------------------------------------------------
// Conversion criterion for a single (sigma, t, p)

struct Lemma2Check {
  bool holds = false;
  double lhs = 0.0;     // (t + tr(sigma rho')) / (t d' + t + 1)
  double rhs = 0.0;     // q(Omega_rho)
  double margin = 0.0;  // lhs - rhs; positive means the criterion fails
};

inline Lemma2Check lemma2_check(const DensityMatrix& rho, const DensityMatrix& rhop,
                                const OmegaParams& params, const sdp::SolverOptions& opt = {}) {
  if (params.sigma.dim() != rhop.dim()) {
    throw DimensionMismatch("lemma2_check: sigma and rho' live on different spaces");
  }
  const DensityMatrix omega = build_omega(rho, params);
  Lemma2Check c;
  c.lhs = (params.t + hs_inner(params.sigma.matrix(), rhop.matrix())) *
          omega_normalization(params.t, rhop.dim());
  c.rhs = q_min_entropy(omega.matrix(), rhop.dim(), rho.dim(), opt).value;
  c.margin = c.lhs - c.rhs;
  c.holds = c.lhs <= c.rhs + tol::lemma2;
  return c;
}

}  // namespace magic
