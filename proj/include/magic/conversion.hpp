#pragma once

// Single-shot conversion rho -> rho' under stabilizer-preserving operations.
//
// Unknown: the Choi matrix J >= 0 on output (x) input. Constraints:
//   Tr_out(J) = I                       d^2 rows, one per Hermitian basis element
//   tr(F E(rho)) = tr(F rho')           d'^2 - 1 rows, traceless F
//   tr(J (A_v (x) Pi_{a,u}^T)) = s_i    one row and one slack s_i >= 0 per (v,a,u)
// The identity component of the conversion condition follows from TP.
//
// An infeasible system yields a Farkas ray y. Writing X = sum y_E E,
// Y = sum y_F F and y_i for the slack rows, the ray gives
//   -(I' (x) X + Y (x) rho^T + sum_i y_i W_i) >= 0,  y_i >= 0,
//   tr X + tr(Y rho') > 0,                               W_i = A_v (x) Pi^T,
// and (sigma, t, p) = (I'/d' + eps Y, eps sum y_i, y_i / sum y_i) violates the
// criterion with eps = 1 / (d' lambda_max(-Y)).

#include <optional>
#include <string>
#include <vector>

#include "channels.hpp"
#include "monotones.hpp"
#include "sdp.hpp"
#include "stabilizer.hpp"

namespace magic {

struct ConversionSdp {
  sdp::SdpProblem problem;
  int dim_in = 0;
  int dim_out = 0;
  std::size_t j_block = 0;
  std::size_t slack_block = 0;
  std::vector<CMatrix> tp_basis;    // Hermitian basis of the input space
  std::vector<CMatrix> conv_basis;  // traceless Hermitian basis of the output space
  std::size_t tp_rows = 0, conv_rows = 0, ineq_rows = 0;
};

inline ConversionSdp build_conversion_sdp(const DensityMatrix& rho, const DensityMatrix& rhop) {
  const int d = rho.dim(), dp = rhop.dim();
  const TripleIndex idx = checked_triples(dp, d, "build_conversion_sdp");
  const MubSet& in = mub_set(d);
  const MubSet& out = mub_set(dp);
  ConversionSdp c;
  c.dim_in = d;
  c.dim_out = dp;
  c.j_block = c.problem.add_psd_block(dp * d);
  c.slack_block = c.problem.add_nonneg_block(int(idx.count()));

  c.tp_basis = hermitian_basis(d);
  for (const auto& e : c.tp_basis) {
    c.problem.add_equality(
        sdp::LinearFunctional().add(c.j_block, kron(CMatrix::Identity(dp, dp), e)),
        e.trace().real());
  }
  const auto out_basis = hermitian_basis(dp);
  c.conv_basis.assign(out_basis.begin() + 1, out_basis.end());
  const CMatrix rho_t = rho.matrix().transpose();
  for (const auto& f : c.conv_basis) {
    c.problem.add_equality(sdp::LinearFunctional().add(c.j_block, kron(f, rho_t)),
                           hs_inner(f, rhop.matrix()));
  }
  for (std::size_t i = 0; i < idx.count(); ++i) {
    const auto t = idx.decode(i);
    const CMatrix w =
        kron(generalized_phase_point(out, t.v), CMatrix(in.projector(t.a, t.u).transpose()));
    c.problem.add_equality(
        sdp::LinearFunctional().add(c.j_block, w).add(c.slack_block, int(i), -1.0), 0.0);
  }
  c.tp_rows = c.tp_basis.size();
  c.conv_rows = c.conv_basis.size();
  c.ineq_rows = idx.count();
  c.problem.set_objective(sdp::LinearFunctional());
  return c;
}

struct Witness {
  DensityMatrix sigma;
  double t = 0.0;
  std::vector<double> p;
  double predicted_margin = 0.0;  // lower bound implied by the ray alone

  OmegaParams params() const { return {sigma, t, p}; }
};

/// Turns a Farkas ray of the conversion system into (sigma, t, p).
inline Witness witness_from_dual(const ConversionSdp& c, const RVector& ray,
                                 const DensityMatrix& rho, const DensityMatrix& rhop) {
  if (ray.size() != Eigen::Index(c.tp_rows + c.conv_rows + c.ineq_rows)) {
    throw DimensionMismatch("witness_from_dual: ray length does not match the system");
  }
  if (rho.dim() != c.dim_in || rhop.dim() != c.dim_out) {
    throw DimensionMismatch("witness_from_dual: states do not match the system");
  }
  const int dp = c.dim_out;
  CMatrix x = CMatrix::Zero(c.dim_in, c.dim_in);
  for (std::size_t k = 0; k < c.tp_rows; ++k) x += ray(Eigen::Index(k)) * c.tp_basis[k];
  CMatrix y = CMatrix::Zero(dp, dp);
  for (std::size_t k = 0; k < c.conv_rows; ++k)
    y += ray(Eigen::Index(c.tp_rows + k)) * c.conv_basis[k];
  const double by = x.trace().real() + hs_inner(y, rhop.matrix());
  if (!(by > 0.0)) throw NumericalFailure("witness_from_dual: ray does not separate");

  std::vector<double> weights(c.ineq_rows);
  double total = 0.0;
  for (std::size_t i = 0; i < c.ineq_rows; ++i) {
    weights[i] = std::max(0.0, ray(Eigen::Index(c.tp_rows + c.conv_rows + i)));
    total += weights[i];
  }
  // sigma = I'/d' - eps Y' with Y' = -Y traceless.
  const CMatrix yp = -Hermitian::symmetrize(y).matrix();
  const double lmax = max_eigenvalue(yp);
  double eps;
  if (lmax > 1e-12 * std::max(1.0, by)) {
    eps = 1.0 / (dp * lmax);
  } else {
    eps = total > 0.0 ? 1.0 / total : 1.0;
  }
  Witness w;
  CMatrix sigma = CMatrix::Identity(dp, dp) / double(dp) - eps * yp;
  // Clip the rounding-level negative eigenvalue at the boundary.
  const Spectrum<Complex> sp = jacobi_eigen(Hermitian::symmetrize(sigma).matrix());
  RVector ev = sp.eigenvalues.cwiseMax(0.0);
  ev /= ev.sum();
  sigma = sp.eigenvectors * ev.asDiagonal() * sp.eigenvectors.adjoint();
  w.sigma = DensityMatrix(Hermitian::symmetrize(sigma));
  w.t = eps * total;
  if (total > 0.0) {
    w.p.resize(c.ineq_rows);
    for (std::size_t i = 0; i < c.ineq_rows; ++i) w.p[i] = weights[i] / total;
  } else {
    w.p.assign(c.ineq_rows, 1.0 / double(c.ineq_rows));
  }
  w.predicted_margin = eps * by * omega_normalization(w.t, dp);
  return w;
}

enum class Verdict { Feasible, Infeasible, Undecided };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Feasible: return "Feasible";
    case Verdict::Infeasible: return "Infeasible";
    case Verdict::Undecided: return "Undecided";
  }
  return "?";
}

struct ConversionResult {
  Verdict verdict = Verdict::Undecided;
  std::optional<ChoiMatrix> choi;
  std::optional<Witness> witness;
  std::optional<Lemma2Check> witness_check;
  std::optional<SpoReport> spo;
  double map_error = std::numeric_limits<double>::quiet_NaN();  // |E(rho) - rho'|_max
  double phase_one_slack = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  int attempts = 0;
  std::string message;
};

struct ConversionOptions {
  // Successive solver tolerances; a failed verification triggers the next.
  std::vector<double> tolerances{1e-10, 1e-12};
  int max_iterations = 200;
};

namespace detail {

inline bool accept_feasible(const ConversionSdp& c, const sdp::SdpSolution& s,
                            const DensityMatrix& rho, const DensityMatrix& rhop,
                            ConversionResult& out) {
  const CMatrix j = Hermitian::symmetrize(s.primal[c.j_block].psd).matrix();
  out.spo = verify_spo(j, c.dim_out, c.dim_in);
  const CMatrix img = apply_choi(j, c.dim_out, c.dim_in, rho.matrix());
  out.map_error = max_abs(img - rhop.matrix());
  if (!out.spo->clean() || out.map_error > tol::conversion_map) {
    out.message = "solver point failed re-verification";
    return false;
  }
  out.choi = ChoiMatrix(c.dim_out, c.dim_in, j);
  return true;
}

inline bool accept_infeasible(const ConversionSdp& c, const sdp::SdpSolution& s,
                              const DensityMatrix& rho, const DensityMatrix& rhop,
                              ConversionResult& out) {
  try {
    const sdp::DualRay ray = sdp::extract_dual_ray(s);
    Witness w = witness_from_dual(c, ray.multipliers, rho, rhop);
    const Lemma2Check chk = lemma2_check(rho, rhop, w.params());
    out.witness = std::move(w);
    out.witness_check = chk;
    if (chk.margin < tol::witness_margin) {
      out.message = "witness margin " + std::to_string(chk.margin) + " below threshold";
      return false;
    }
    return true;
  } catch (const std::exception& e) {
    out.message = std::string("witness extraction failed: ") + e.what();
    return false;
  }
}

}  // namespace detail

/// Decides whether an SPO maps rho to rho'. Every answer is re-verified:
/// a Feasible Choi matrix must pass verify_spo and reproduce rho', an
/// Infeasible witness must violate the criterion. Anything else, including
/// the solver's undecided band, is reported as Undecided.
inline ConversionResult check_conversion(const DensityMatrix& rho, const DensityMatrix& rhop,
                                         const ConversionOptions& opt = {}) {
  const ConversionSdp c = build_conversion_sdp(rho, rhop);
  ConversionResult out;
  for (double tolerance : opt.tolerances) {
    ++out.attempts;
    sdp::SolverOptions so;
    so.tolerance = tolerance;
    so.max_iterations = opt.max_iterations;
    const sdp::SdpSolution s = sdp::feasibility(c.problem, so);
    out.phase_one_slack = s.phase_one_slack;
    out.iterations += s.iterations;
    if (s.status == sdp::Status::FeasiblePoint) {
      if (detail::accept_feasible(c, s, rho, rhop, out)) {
        out.verdict = Verdict::Feasible;
        out.message = "converting channel found";
        return out;
      }
    } else if (s.status == sdp::Status::Infeasible) {
      if (detail::accept_infeasible(c, s, rho, rhop, out)) {
        out.verdict = Verdict::Infeasible;
        out.message = "witness found";
        return out;
      }
    } else {
      out.message = "solver undecided: " + s.message;
    }
  }
  out.verdict = Verdict::Undecided;
  return out;
}

// ---------------------------------------------------------------------------
// Monotone ordering versus the conversion verdict

struct CorollarySample {
  DensityMatrix sigma;
  double t = 0.0;
};

struct CorollaryReport {
  Verdict verdict = Verdict::Undecided;
  struct Row {
    double t;
    double m_rho;
    double m_rhop;
    bool ordered;  // M(rho) >= M(rho') - tolerance
  };
  std::vector<Row> rows;
  bool witness_violates_ordering = false;
  bool consistent = false;
  std::string message;
};

/// Feasible conversions must respect the ordering at every sample;
/// Infeasible ones must have their witness violate it.
inline CorollaryReport corollary_check(const DensityMatrix& rho, const DensityMatrix& rhop,
                                       const std::vector<CorollarySample>& samples,
                                       const ConversionOptions& opt = {}) {
  CorollaryReport r;
  const ConversionResult conv = check_conversion(rho, rhop, opt);
  r.verdict = conv.verdict;
  bool all_ordered = true;
  for (const auto& s : samples) {
    const double a = monotone(s.sigma, s.t, rho).value;
    const double b = monotone(s.sigma, s.t, rhop).value;
    const bool ok = a >= b - tol::monotone_order;
    all_ordered = all_ordered && ok;
    r.rows.push_back({s.t, a, b, ok});
  }
  switch (conv.verdict) {
    case Verdict::Feasible:
      r.consistent = all_ordered;
      r.message = all_ordered ? "consistent-feasible" : "ordering violated by a feasible pair";
      break;
    case Verdict::Infeasible: {
      const Witness& w = *conv.witness;
      const double a = monotone(w.sigma, w.t, rho).value;
      const double b = monotone(w.sigma, w.t, rhop).value;
      r.witness_violates_ordering = a < b;
      r.rows.push_back({w.t, a, b, a >= b - tol::monotone_order});
      r.consistent =
          conv.witness_check && !conv.witness_check->holds && r.witness_violates_ordering;
      r.message = r.consistent ? "consistent-infeasible" : "witness does not violate the criterion";
      break;
    }
    case Verdict::Undecided:
      r.consistent = false;
      r.message = "undecided: " + conv.message;
      break;
  }
  return r;
}

}  // namespace magic
