#pragma once

// Channels in Choi form. J lives on output (x) input, built from the
// unnormalized maximally entangled vector, so Tr_out(J) = I for a
// trace-preserving map and E(rho) = Tr_in(J (I (x) rho^T)).

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "stabilizer.hpp"

namespace magic {

struct ChoiTolerance {
  double psd = tol::choi_psd;
  double tp = tol::choi_tp;
};

/// Max-norm of Tr_out(J) - I.
inline double tp_residual(const CMatrix& j, int dim_out, int dim_in) {
  return max_abs(partial_trace(j, dim_out, dim_in, Keep::B) -
                 CMatrix::Identity(dim_in, dim_in));
}

class ChoiMatrix {
 public:
  ChoiMatrix() = default;

  ChoiMatrix(int dim_out, int dim_in, const CMatrix& matrix, ChoiTolerance tolerance = {})
      : dim_out_(dim_out), dim_in_(dim_in) {
    require_prime(dim_out, "ChoiMatrix");
    require_prime(dim_in, "ChoiMatrix");
    if (matrix.rows() != Eigen::Index(dim_out) * dim_in || matrix.cols() != matrix.rows()) {
      throw DimensionMismatch("ChoiMatrix: expected a " + std::to_string(dim_out * dim_in) +
                              "x" + std::to_string(dim_out * dim_in) + " matrix");
    }
    h_ = Hermitian(matrix, std::max(tol::hermitian, tolerance.psd));
    const double lmin = min_eigenvalue(h_.matrix());
    if (lmin < -tolerance.psd) {
      throw InvariantViolation("ChoiMatrix: not completely positive (minimum eigenvalue " +
                               std::to_string(lmin) + ")");
    }
    const double tp = tp_residual(h_.matrix(), dim_out, dim_in);
    if (tp > tolerance.tp) {
      throw InvariantViolation("ChoiMatrix: not trace preserving (residual " +
                               std::to_string(tp) + ")");
    }
  }

  int dim_out() const { return dim_out_; }
  int dim_in() const { return dim_in_; }
  const Hermitian& hermitian() const { return h_; }
  const CMatrix& matrix() const { return h_.matrix(); }

 private:
  int dim_out_ = 0;
  int dim_in_ = 0;
  Hermitian h_;
};

/// Tr_in(J (I (x) X^T)) for any square X on the input space.
inline CMatrix apply_choi(const CMatrix& j, int dim_out, int dim_in, const CMatrix& x) {
  if (x.rows() != dim_in || x.cols() != dim_in) {
    throw DimensionMismatch("apply_channel: state dimension " + std::to_string(x.rows()) +
                            " != channel input dimension " + std::to_string(dim_in));
  }
  CMatrix out = CMatrix::Zero(dim_out, dim_out);
  // (J (I (x) X^T))_{(i,k),(l,k)} summed over k; (I (x) X^T)_{(m,n),(l,k)} = d_ml X_kn.
  for (int i = 0; i < dim_out; ++i)
    for (int l = 0; l < dim_out; ++l) {
      Complex s = 0.0;
      for (int k = 0; k < dim_in; ++k)
        for (int n = 0; n < dim_in; ++n) s += j(i * dim_in + k, l * dim_in + n) * x(k, n);
      out(i, l) = s;
    }
  return out;
}

/// E(rho). Fails when the output trace deviates from 1 by more than
/// `tolerance`, which signals an invalid Choi matrix.
inline DensityMatrix apply_channel(const ChoiMatrix& j, const DensityMatrix& rho,
                                   double tolerance = tol::channel_trace) {
  const CMatrix out = apply_choi(j.matrix(), j.dim_out(), j.dim_in(), rho.matrix());
  const double tr = out.trace().real();
  if (std::abs(tr - 1.0) > tolerance) {
    throw InvariantViolation("apply_channel: output trace " + std::to_string(tr) +
                             " != 1; Choi matrix is not trace preserving");
  }
  return DensityMatrix(Hermitian::symmetrize(out), tolerance);
}

/// Choi matrix sum_ij E(|i><j|) (x) |i><j| of a linear map on matrices.
inline CMatrix choi_of_map(int dim_out, int dim_in,
                           const std::function<CMatrix(const CMatrix&)>& map) {
  CMatrix j = CMatrix::Zero(dim_out * dim_in, dim_out * dim_in);
  for (int a = 0; a < dim_in; ++a)
    for (int b = 0; b < dim_in; ++b) {
      CMatrix e = CMatrix::Zero(dim_in, dim_in);
      e(a, b) = 1.0;
      const CMatrix img = map(e);
      for (int i = 0; i < dim_out; ++i)
        for (int l = 0; l < dim_out; ++l) j(i * dim_in + a, l * dim_in + b) = img(i, l);
    }
  return j;
}

/// sum_ij |ii><jj|.
inline ChoiMatrix choi_identity(int d) {
  return ChoiMatrix(d, d, choi_of_map(d, d, [](const CMatrix& x) { return x; }));
}

/// Choi matrix of rho -> V rho V^dagger.
inline ChoiMatrix choi_unitary(const CMatrix& v) {
  const int d = static_cast<int>(v.rows());
  return ChoiMatrix(d, d, choi_of_map(d, d, [&](const CMatrix& x) -> CMatrix {
                      return v * x * v.adjoint();
                    }));
}

/// E(rho) = sum_k tr(rho M_k) sigma_k, i.e. J = sum_k sigma_k (x) M_k^T.
/// Effects must form a POVM and every prepared state must be a stabilizer
/// state, which makes E stabilizer preserving.
inline ChoiMatrix choi_measure_prepare(const std::vector<CMatrix>& povm,
                                       const std::vector<DensityMatrix>& prepares) {
  if (povm.empty() || povm.size() != prepares.size()) {
    throw InvariantViolation("choi_measure_prepare: need one prepared state per effect");
  }
  const int din = static_cast<int>(povm.front().rows());
  const int dout = prepares.front().dim();
  CMatrix total = CMatrix::Zero(din, din);
  CMatrix j = CMatrix::Zero(dout * din, dout * din);
  for (std::size_t k = 0; k < povm.size(); ++k) {
    const CMatrix& m = povm[k];
    if (m.rows() != din || m.cols() != din || prepares[k].dim() != dout) {
      throw DimensionMismatch("choi_measure_prepare: inconsistent dimensions");
    }
    if (hermiticity_error(m) > tol::povm || min_eigenvalue(m) < -tol::povm) {
      throw InvariantViolation("choi_measure_prepare: effect " + std::to_string(k) +
                               " is not positive semidefinite");
    }
    if (!is_stabilizer(prepares[k]).stabilizer) {
      throw InvariantViolation("choi_measure_prepare: prepared state " + std::to_string(k) +
                               " is not a stabilizer state");
    }
    total += m;
    j += kron(prepares[k].matrix(), CMatrix(m.transpose()));
  }
  if (max_abs(total - CMatrix::Identity(din, din)) > tol::povm) {
    throw InvariantViolation("choi_measure_prepare: effects do not sum to the identity");
  }
  return ChoiMatrix(dout, din, j);
}

// ---------------------------------------------------------------------------
// Stabilizer-preservation check

struct SpoViolation {
  std::vector<int> v;  // output phase-point index
  int a = 0;           // input basis
  int u = 0;           // input basis vector
  double value = 0.0;  // tr(J (A_v (x) Pi_{a,u}^T))
};

struct SpoTolerance {
  double psd = tol::choi_psd;
  double tp = tol::choi_tp;
  double sp = tol::spo_inequality;
};

struct SpoReport {
  bool cp_ok = false;
  bool tp_ok = false;
  double min_eigenvalue = 0.0;
  double tp_residual = 0.0;
  double worst_value = std::numeric_limits<double>::infinity();
  std::vector<SpoViolation> sp_violations;
  bool exhaustive = true;  // false when only the worst v per (a,u) is listed

  bool clean() const { return cp_ok && tp_ok && sp_violations.empty(); }
};

/// Checks CP, TP and tr(A_v E(Pi_{a,u})) >= -tol for every output index v and
/// every input MUB projector. Violations are listed for every v when the
/// output index set is small enough to enumerate, otherwise the worst v per
/// (a,u) is reported.
inline SpoReport verify_spo(const CMatrix& j, int dim_out, int dim_in, SpoTolerance t = {}) {
  SpoReport r;
  r.min_eigenvalue = min_eigenvalue(j);
  r.cp_ok = r.min_eigenvalue >= -t.psd;
  r.tp_residual = tp_residual(j, dim_out, dim_in);
  r.tp_ok = r.tp_residual <= t.tp;
  const MubSet& in = mub_set(dim_in);
  const MubSet& out = mub_set(dim_out);
  const PhasePointIndex index(dim_out);
  r.exhaustive = index.count() <= kMaxMaterializedPhasePoints;
  for (int a = 0; a <= dim_in; ++a)
    for (int u = 0; u < dim_in; ++u) {
      const CMatrix img = apply_choi(j, dim_out, dim_in, in.projector(a, u));
      // overlaps[b][w] = tr(Pi'_{b,w} E(Pi_{a,u}))
      std::vector<std::vector<double>> ov(std::size_t(dim_out + 1),
                                          std::vector<double>(std::size_t(dim_out)));
      for (int b = 0; b <= dim_out; ++b)
        for (int w = 0; w < dim_out; ++w) ov[b][w] = hs_inner(out.projector(b, w), img);
      const double tr = img.trace().real();
      if (r.exhaustive) {
        for (std::size_t flat = 0; flat < index.count(); ++flat) {
          const std::vector<int> v = index.decode(flat);
          double val = -tr;
          for (int b = 0; b <= dim_out; ++b) val += ov[b][v[b]];
          r.worst_value = std::min(r.worst_value, val);
          if (val < -t.sp) r.sp_violations.push_back({v, a, u, val});
        }
      } else {
        std::vector<int> v(std::size_t(dim_out + 1));
        double val = -tr;
        for (int b = 0; b <= dim_out; ++b) {
          int arg = 0;
          for (int w = 1; w < dim_out; ++w)
            if (ov[b][w] < ov[b][arg]) arg = w;
          v[b] = arg;
          val += ov[b][arg];
        }
        r.worst_value = std::min(r.worst_value, val);
        if (val < -t.sp) r.sp_violations.push_back({v, a, u, val});
      }
    }
  return r;
}

inline SpoReport verify_spo(const ChoiMatrix& j, SpoTolerance t = {}) {
  return verify_spo(j.matrix(), j.dim_out(), j.dim_in(), t);
}

}  // namespace magic
