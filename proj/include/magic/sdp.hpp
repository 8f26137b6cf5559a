#pragma once

// Small dense conic solver. Problems are stated over Hermitian PSD blocks
// and non-negative scalar blocks with linear equalities; internally every
// Hermitian block is realified and handed to the interior-point core.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "linalg.hpp"
#include "sdp_ipm.hpp"

namespace magic::sdp {

enum class BlockKind { PsdHermitian, NonnegScalar };

struct BlockSpec {
  BlockKind kind;
  int dim;  // matrix side for PSD blocks, entry count for scalar blocks
};

/// sum_b Re tr(C_b X_b) + sum coeff * x_b[index].
struct LinearFunctional {
  struct PsdTerm {
    std::size_t block;
    CMatrix coeff;
  };
  struct ScalarTerm {
    std::size_t block;
    int index;
    double coeff;
  };
  std::vector<PsdTerm> psd;
  std::vector<ScalarTerm> scalar;

  LinearFunctional& add(std::size_t block, CMatrix coeff) {
    psd.push_back({block, std::move(coeff)});
    return *this;
  }
  LinearFunctional& add(std::size_t block, int index, double coeff) {
    scalar.push_back({block, index, coeff});
    return *this;
  }
};

struct Equality {
  LinearFunctional lhs;
  double rhs;
};

enum class Sense { Minimize, Maximize };

/// Value of one block: `psd` for PSD blocks, `scalars` for scalar blocks.
struct BlockValue {
  CMatrix psd;
  RVector scalars;
};
using BlockValues = std::vector<BlockValue>;

class SdpProblem {
 public:
  std::size_t add_psd_block(int dim) {
    if (dim <= 0) throw InvariantViolation("SdpProblem: block dimension must be positive");
    blocks_.push_back({BlockKind::PsdHermitian, dim});
    return blocks_.size() - 1;
  }
  std::size_t add_nonneg_block(int count) {
    if (count <= 0) throw InvariantViolation("SdpProblem: block dimension must be positive");
    blocks_.push_back({BlockKind::NonnegScalar, count});
    return blocks_.size() - 1;
  }
  void add_equality(LinearFunctional f, double rhs) {
    equalities_.push_back({std::move(f), rhs});
  }
  void set_objective(LinearFunctional f, Sense sense = Sense::Minimize) {
    objective_ = std::move(f);
    sense_ = sense;
  }

  const std::vector<BlockSpec>& blocks() const { return blocks_; }
  const std::vector<Equality>& equalities() const { return equalities_; }
  const LinearFunctional& objective() const { return objective_; }
  Sense sense() const { return sense_; }

  /// Throws InvariantViolation naming the first malformed term.
  void validate() const {
    if (blocks_.empty()) throw InvariantViolation("SdpProblem: no blocks");
    auto check = [&](const LinearFunctional& f, const std::string& where) {
      for (const auto& t : f.psd) {
        if (t.block >= blocks_.size() || blocks_[t.block].kind != BlockKind::PsdHermitian)
          throw InvariantViolation(where + ": PSD term refers to a non-PSD block");
        const int n = blocks_[t.block].dim;
        if (t.coeff.rows() != n || t.coeff.cols() != n)
          throw InvariantViolation(where + ": coefficient shape does not match block");
        if (!t.coeff.allFinite()) throw InvariantViolation(where + ": non-finite coefficient");
        if (hermiticity_error(t.coeff) > 1e-10)
          throw InvariantViolation(where + ": coefficient is not Hermitian");
      }
      for (const auto& t : f.scalar) {
        if (t.block >= blocks_.size() || blocks_[t.block].kind != BlockKind::NonnegScalar)
          throw InvariantViolation(where + ": scalar term refers to a non-scalar block");
        if (t.index < 0 || t.index >= blocks_[t.block].dim)
          throw InvariantViolation(where + ": scalar index out of range");
        if (!std::isfinite(t.coeff)) throw InvariantViolation(where + ": non-finite coefficient");
      }
    };
    check(objective_, "objective");
    for (std::size_t i = 0; i < equalities_.size(); ++i) {
      check(equalities_[i].lhs, "equality " + std::to_string(i));
      if (!std::isfinite(equalities_[i].rhs))
        throw InvariantViolation("equality " + std::to_string(i) + ": non-finite rhs");
    }
  }

  double evaluate(const LinearFunctional& f, const BlockValues& v) const {
    double s = 0.0;
    for (const auto& t : f.psd) s += hs_inner(t.coeff, v[t.block].psd);
    for (const auto& t : f.scalar) s += t.coeff * v[t.block].scalars(t.index);
    return s;
  }

  /// Max-norm of A(x) - b.
  double primal_residual(const BlockValues& v) const {
    double r = 0.0;
    for (const auto& e : equalities_) r = std::max(r, std::abs(evaluate(e.lhs, v) - e.rhs));
    return r;
  }

  /// The assembled dual operator -A^T(y), block by block.
  BlockValues adjoint(const RVector& y) const {
    BlockValues out(blocks_.size());
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      if (blocks_[b].kind == BlockKind::PsdHermitian)
        out[b].psd = CMatrix::Zero(blocks_[b].dim, blocks_[b].dim);
      else
        out[b].scalars = RVector::Zero(blocks_[b].dim);
    }
    for (std::size_t i = 0; i < equalities_.size(); ++i) {
      for (const auto& t : equalities_[i].lhs.psd) out[t.block].psd += y(Eigen::Index(i)) * t.coeff;
      for (const auto& t : equalities_[i].lhs.scalar)
        out[t.block].scalars(t.index) += y(Eigen::Index(i)) * t.coeff;
    }
    return out;
  }

 private:
  std::vector<BlockSpec> blocks_;
  std::vector<Equality> equalities_;
  LinearFunctional objective_;
  Sense sense_ = Sense::Minimize;
};

enum class Status { Optimal, Infeasible, FeasiblePoint, NumericalFailure };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "Optimal";
    case Status::Infeasible: return "Infeasible";
    case Status::FeasiblePoint: return "FeasiblePoint";
    case Status::NumericalFailure: return "NumericalFailure";
  }
  return "?";
}

/// Farkas certificate for {A x = b, x in K}: multipliers y with
/// -A^T(y) in K and b'y > 0. Normalized so that the assembled operator
/// -A^T(y) has unit total trace (or, when it vanishes, y has unit max-norm).
struct DualRay {
  RVector multipliers;
  double margin = 0.0;          // b'y after normalization
  double cone_violation = 0.0;  // max(0, -lambda_min) over the assembled blocks
};

struct SdpSolution {
  Status status = Status::NumericalFailure;
  BlockValues primal;
  RVector dual;            // one multiplier per equality
  BlockValues dual_slack;  // c - A^T(y)
  double primal_residual = std::numeric_limits<double>::quiet_NaN();
  double dual_residual = std::numeric_limits<double>::quiet_NaN();
  double objective = std::numeric_limits<double>::quiet_NaN();
  double dual_objective = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::quiet_NaN();
  double phase_one_slack = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  std::optional<DualRay> ray;
  std::string message;
};

struct SolverOptions {
  int max_iterations = 200;
  double tolerance = 1e-10;   // relative target for residuals and gap
  double trace_bound = 1e6;   // phase-I ball: total trace of the shifted point
};

/// Scores a multiplier vector as an infeasibility certificate; scale-free.
inline DualRay assess_ray(const SdpProblem& p, const RVector& y) {
  BlockValues z = p.adjoint(y);
  double total_trace = 0.0;
  for (std::size_t b = 0; b < z.size(); ++b) {
    if (p.blocks()[b].kind == BlockKind::PsdHermitian) {
      z[b].psd = -z[b].psd;
      total_trace += z[b].psd.trace().real();
    } else {
      z[b].scalars = -z[b].scalars;
      total_trace += z[b].scalars.sum();
    }
  }
  double scale = total_trace;
  if (!(scale > 1e-12 * std::max(1.0, y.cwiseAbs().maxCoeff()))) {
    scale = y.size() ? y.cwiseAbs().maxCoeff() : 1.0;
  }
  if (scale <= 0) scale = 1.0;
  DualRay ray;
  ray.multipliers = y / scale;
  double violation = 0.0;
  for (std::size_t b = 0; b < z.size(); ++b) {
    if (p.blocks()[b].kind == BlockKind::PsdHermitian)
      violation = std::max(violation, -min_eigenvalue(z[b].psd) / scale);
    else if (z[b].scalars.size())
      violation = std::max(violation, -z[b].scalars.minCoeff() / scale);
  }
  ray.cone_violation = std::max(0.0, violation);
  double by = 0.0;
  for (std::size_t i = 0; i < p.equalities().size(); ++i)
    by += p.equalities()[i].rhs * ray.multipliers(Eigen::Index(i));
  ray.margin = by;
  return ray;
}

namespace detail {

struct Lowered {
  RealProblem real;
  std::vector<int> sdp_of_block;  // real SDP block index, or -1
  std::vector<int> lp_offset;     // first LP variable of a scalar block, or -1
  std::vector<int> kept_rows;     // original equality indices kept
  double objective_sign = 1.0;
};

/// Row-reduces the equality system. Returns the indices of a maximal
/// independent subset, or a Farkas vector when the dependent rows are
/// inconsistent.
struct Reduction {
  std::vector<int> kept;
  std::optional<RVector> inconsistency;
};

inline Reduction reduce_rows(const SdpProblem& p) {
  const auto& blocks = p.blocks();
  std::vector<Eigen::Index> offset(blocks.size());
  Eigen::Index ncols = 0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    offset[b] = ncols;
    ncols += blocks[b].kind == BlockKind::PsdHermitian ? Eigen::Index(blocks[b].dim) * blocks[b].dim * 2
                                                       : blocks[b].dim;
  }
  const Eigen::Index m = static_cast<Eigen::Index>(p.equalities().size());
  Reduction red;
  if (m == 0) return red;
  RMatrix At = RMatrix::Zero(ncols, m);
  RVector b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& e = p.equalities()[std::size_t(i)];
    b(i) = e.rhs;
    for (const auto& t : e.lhs.psd) {
      const int n = blocks[t.block].dim;
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
          At(offset[t.block] + 2 * (r * n + c), i) += t.coeff(r, c).real();
          At(offset[t.block] + 2 * (r * n + c) + 1, i) += t.coeff(r, c).imag();
        }
    }
    for (const auto& t : e.lhs.scalar) At(offset[t.block] + t.index, i) += t.coeff;
  }
  Eigen::ColPivHouseholderQR<RMatrix> qr(At);
  qr.setThreshold(1e-10);
  const Eigen::Index rank = qr.rank();
  const auto perm = qr.colsPermutation().indices();
  for (Eigen::Index k = 0; k < rank; ++k) red.kept.push_back(int(perm(k)));
  if (rank == m) {
    std::sort(red.kept.begin(), red.kept.end());
    return red;
  }
  const RMatrix R = qr.matrixR().topLeftCorner(rank, m).template triangularView<Eigen::Upper>();
  const RMatrix R11 = R.topLeftCorner(rank, rank);
  double bmax = std::max(1.0, b.cwiseAbs().maxCoeff());
  for (Eigen::Index k = rank; k < m; ++k) {
    const RVector coef =
        R11.template triangularView<Eigen::Upper>().solve(RVector(R.block(0, k, rank, 1)));
    double pred = 0.0;
    for (Eigen::Index a = 0; a < rank; ++a) pred += coef(a) * b(perm(a));
    const double mismatch = b(perm(k)) - pred;
    if (std::abs(mismatch) > 1e-9 * bmax * (1.0 + coef.lpNorm<1>())) {
      RVector y = RVector::Zero(m);
      for (Eigen::Index a = 0; a < rank; ++a) y(perm(a)) = -coef(a);
      y(perm(k)) = 1.0;
      if (mismatch < 0) y = -y;
      red.inconsistency = y;
      return red;
    }
  }
  std::sort(red.kept.begin(), red.kept.end());
  return red;
}

inline Lowered lower(const SdpProblem& p, const std::vector<int>& kept) {
  Lowered lo;
  const auto& blocks = p.blocks();
  auto& rp = lo.real;
  lo.sdp_of_block.assign(blocks.size(), -1);
  lo.lp_offset.assign(blocks.size(), -1);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].kind == BlockKind::PsdHermitian) {
      lo.sdp_of_block[b] = rp.num_sdp();
      rp.sdp_dims.push_back(2 * blocks[b].dim);
    } else {
      lo.lp_offset[b] = rp.n_lp;
      rp.n_lp += blocks[b].dim;
    }
  }
  lo.kept_rows = kept;
  rp.m = static_cast<int>(kept.size());
  rp.b.resize(rp.m);
  rp.lp_cols.assign(std::size_t(rp.n_lp), {});
  rp.sdp_coeffs.resize(rp.sdp_dims.size());
  std::vector<std::vector<std::pair<int, RMatrix>>> entries(rp.sdp_dims.size());
  for (int r = 0; r < rp.m; ++r) {
    const auto& e = p.equalities()[std::size_t(kept[r])];
    rp.b(r) = e.rhs;
    std::vector<RMatrix> acc(rp.sdp_dims.size());
    for (const auto& t : e.lhs.psd) {
      const int j = lo.sdp_of_block[t.block];
      const RMatrix c = realify(t.coeff) / 2.0;
      if (acc[j].size() == 0) acc[j] = c; else acc[j] += c;
    }
    for (std::size_t j = 0; j < acc.size(); ++j)
      if (acc[j].size()) entries[j].push_back({r, acc[j]});
    for (const auto& t : e.lhs.scalar)
      rp.lp_cols[std::size_t(lo.lp_offset[t.block] + t.index)].push_back({r, t.coeff});
  }
  for (int j = 0; j < rp.num_sdp(); ++j) rp.finalize_block(j, entries[j]);
  // Merge duplicate (row) entries in LP columns.
  for (auto& col : rp.lp_cols) {
    std::sort(col.begin(), col.end());
    std::vector<std::pair<int, double>> merged;
    for (const auto& e : col) {
      if (!merged.empty() && merged.back().first == e.first) merged.back().second += e.second;
      else merged.push_back(e);
    }
    col = std::move(merged);
  }
  lo.objective_sign = p.sense() == Sense::Maximize ? -1.0 : 1.0;
  rp.c_sdp.assign(rp.sdp_dims.size(), RMatrix());
  for (int j = 0; j < rp.num_sdp(); ++j) rp.c_sdp[j] = RMatrix::Zero(rp.sdp_dims[j], rp.sdp_dims[j]);
  rp.c_lp = RVector::Zero(rp.n_lp);
  for (const auto& t : p.objective().psd)
    rp.c_sdp[lo.sdp_of_block[t.block]] += lo.objective_sign * realify(t.coeff) / 2.0;
  for (const auto& t : p.objective().scalar)
    rp.c_lp(lo.lp_offset[t.block] + t.index) += lo.objective_sign * t.coeff;
  return lo;
}

inline BlockValues lift(const SdpProblem& p, const Lowered& lo, const std::vector<RMatrix>& X,
                        const RVector& x) {
  BlockValues out(p.blocks().size());
  for (std::size_t b = 0; b < p.blocks().size(); ++b) {
    if (p.blocks()[b].kind == BlockKind::PsdHermitian)
      out[b].psd = derealify(X[lo.sdp_of_block[b]]);
    else
      out[b].scalars = x.segment(lo.lp_offset[b], p.blocks()[b].dim);
  }
  return out;
}

inline RVector expand_dual(const SdpProblem& p, const Lowered& lo, const RVector& y) {
  RVector out = RVector::Zero(static_cast<Eigen::Index>(p.equalities().size()));
  for (std::size_t r = 0; r < lo.kept_rows.size(); ++r) out(lo.kept_rows[r]) = y(Eigen::Index(r));
  return out;
}

inline SdpSolution infeasible_from_reduction(const SdpProblem& p, const RVector& y) {
  SdpSolution s;
  s.status = Status::Infeasible;
  s.ray = assess_ray(p, y);
  s.dual = y;
  s.message = "equality constraints are inconsistent";
  return s;
}

}  // namespace detail

/// Phase-I feasibility: minimize s >= 0 such that x + s e lies in the cone
/// (every PSD block shifted by s I, every scalar by s) while A x = b.
/// FeasiblePoint iff the optimal slack is <= tol::feasible_slack; Infeasible
/// iff the dual bound is >= tol::infeasible_slack, with a certificate;
/// NumericalFailure in between.
inline SdpSolution feasibility(const SdpProblem& p, const SolverOptions& opt = {}) {
  p.validate();
  const detail::Reduction red = detail::reduce_rows(p);
  if (red.inconsistency) return detail::infeasible_from_reduction(p, *red.inconsistency);

  detail::Lowered lo = detail::lower(p, red.kept);
  detail::RealProblem& rp = lo.real;
  const int m0 = rp.m;
  // Original objective is irrelevant in phase I.
  for (auto& c : rp.c_sdp) c.setZero();
  rp.c_lp.setZero();

  // Column for s: -A(e); then a bound row  <e, xhat>/R + w = 1.
  RVector ae = RVector::Zero(m0);
  for (int j = 0; j < rp.num_sdp(); ++j) {
    const int n = rp.sdp_dims[j];
    const RMatrix I = RMatrix::Identity(n, n);
    const auto& bc = rp.sdp_coeffs[j];
    const RVector t = bc.cols.transpose() * Eigen::Map<const RVector>(I.data(), n * n);
    for (std::size_t k = 0; k < bc.rows.size(); ++k) ae(bc.rows[k]) += t(Eigen::Index(k));
  }
  for (int k = 0; k < rp.n_lp; ++k)
    for (const auto& [r, a] : rp.lp_cols[k]) ae(r) += a;
  const double R = opt.trace_bound;
  const int bound_row = m0;
  rp.m = m0 + 1;
  rp.b.conservativeResize(rp.m);
  rp.b(bound_row) = 1.0;
  for (int j = 0; j < rp.num_sdp(); ++j) {
    const int n = rp.sdp_dims[j];
    auto& bc = rp.sdp_coeffs[j];
    bc.rows.push_back(bound_row);
    bc.cols.conservativeResize(Eigen::NoChange, bc.cols.cols() + 1);
    const RMatrix I = RMatrix::Identity(n, n) / R;
    bc.cols.col(bc.cols.cols() - 1) = Eigen::Map<const RVector>(I.data(), n * n);
  }
  for (int k = 0; k < rp.n_lp; ++k) rp.lp_cols[k].push_back({bound_row, 1.0 / R});
  const int s_var = rp.n_lp;
  const int w_var = rp.n_lp + 1;
  rp.lp_cols.emplace_back();
  for (int r = 0; r < m0; ++r)
    if (ae(r) != 0.0) rp.lp_cols.back().push_back({r, -ae(r)});
  rp.lp_cols.push_back({{bound_row, 1.0}});
  rp.n_lp += 2;
  rp.c_lp.conservativeResize(rp.n_lp);
  rp.c_lp(s_var) = 1.0;
  rp.c_lp(w_var) = 0.0;

  detail::IpmOptions io{opt.max_iterations, opt.tolerance};
  const detail::IpmResult r = detail::run_ipm(rp, io);

  SdpSolution sol;
  sol.iterations = r.iterations;
  sol.message = r.message;
  const double s = r.it.x(s_var);
  sol.phase_one_slack = s;
  sol.objective = r.pobj;
  sol.dual_objective = r.dobj;
  sol.gap = r.gap;

  // Shift back: x = xhat - s e.
  std::vector<RMatrix> X = r.it.X;
  for (auto& M : X) M -= s * RMatrix::Identity(M.rows(), M.cols());
  RVector x = r.it.x.head(s_var).array() - s;
  lo.real.n_lp = s_var;  // lift() reads offsets only
  sol.primal = detail::lift(p, lo, X, x);
  sol.primal_residual = p.primal_residual(sol.primal);
  sol.dual = detail::expand_dual(p, lo, r.it.y.head(m0));
  sol.dual_residual = r.dual_residual;

  const bool accurate = r.pinf < 1e-8 && r.dinf < 1e-8;
  if (accurate && s <= tol::feasible_slack && sol.primal_residual <= tol::sdp_primal_residual) {
    sol.status = Status::FeasiblePoint;
    return sol;
  }
  // The dual objective b'y + eta is a certified lower bound on s.
  if (r.dinf < 1e-8 && r.dobj >= tol::infeasible_slack) {
    DualRay ray = assess_ray(p, sol.dual);
    sol.ray = ray;
    if (ray.margin >= tol::ray_margin && ray.cone_violation <= 1e-8) {
      sol.status = Status::Infeasible;
      return sol;
    }
    sol.status = Status::NumericalFailure;
    sol.message = "dual ray failed verification";
    return sol;
  }
  sol.status = Status::NumericalFailure;
  if (r.converged) sol.message = "phase-I slack in the undecided band";
  return sol;
}

/// Returns the certificate of an Infeasible solution; throws when the ray
/// does not separate by at least tol::ray_margin.
inline DualRay extract_dual_ray(const SdpSolution& s) {
  if (s.status != Status::Infeasible || !s.ray) {
    throw InvariantViolation("extract_dual_ray: solution is not Infeasible");
  }
  if (s.ray->margin < tol::ray_margin) {
    throw NumericalFailure("extract_dual_ray: separation margin " +
                           std::to_string(s.ray->margin) + " below threshold");
  }
  return *s.ray;
}

/// Optimizes the objective. Status Optimal when residuals and gap meet
/// tol::sdp_primal_residual / tol::sdp_relative_gap; when the iteration
/// fails, phase I decides between Infeasible and NumericalFailure.
inline SdpSolution solve(const SdpProblem& p, const SolverOptions& opt = {}) {
  p.validate();
  const detail::Reduction red = detail::reduce_rows(p);
  if (red.inconsistency) return detail::infeasible_from_reduction(p, *red.inconsistency);
  const detail::Lowered lo = detail::lower(p, red.kept);
  const detail::IpmResult r = detail::run_ipm(lo.real, {opt.max_iterations, opt.tolerance});

  SdpSolution sol;
  sol.iterations = r.iterations;
  sol.message = r.message;
  sol.primal = detail::lift(p, lo, r.it.X, r.it.x);
  sol.dual = detail::expand_dual(p, lo, r.it.y);
  sol.dual_slack = detail::lift(p, lo, r.it.Z, r.it.z);
  sol.primal_residual = p.primal_residual(sol.primal);
  sol.dual_residual = r.dual_residual;
  sol.objective = p.evaluate(p.objective(), sol.primal);
  sol.dual_objective = lo.objective_sign * r.dobj;
  sol.gap = std::abs(sol.objective - sol.dual_objective);

  const bool ok = sol.primal_residual <= tol::sdp_primal_residual &&
                  sol.dual_residual <= tol::sdp_primal_residual &&
                  sol.gap <= tol::sdp_relative_gap * (1.0 + std::abs(sol.objective));
  if (ok) {
    sol.status = Status::Optimal;
    return sol;
  }
  SdpSolution ph = feasibility(p, opt);
  if (ph.status == Status::Infeasible) {
    ph.message = "infeasible (phase I): " + ph.message;
    return ph;
  }
  sol.status = Status::NumericalFailure;
  sol.message = "no convergence: " + r.message;
  return sol;
}

}  // namespace magic::sdp
