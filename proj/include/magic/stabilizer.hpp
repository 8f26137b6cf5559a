#pragma once

// Pure stabilizer states (a complete set of mutually unbiased bases),
// standard and generalized phase-point operators, discrete Wigner functions
// and membership tests for the stabilizer polytope in prime dimension d.

#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include "linalg.hpp"

namespace magic {

inline bool is_prime(int n) {
  if (n < 2) return false;
  for (int k = 2; k * k <= n; ++k)
    if (n % k == 0) return false;
  return true;
}

inline void require_prime(int d, const char* who) {
  if (!is_prime(d)) {
    throw InvariantViolation(std::string(who) + ": dimension " + std::to_string(d) +
                             " is not prime");
  }
}

inline void require_odd_prime(int d, const char* who) {
  require_prime(d, who);
  if (d == 2) {
    throw InvariantViolation(std::string(who) +
                             ": standard phase-point operators are defined for odd prime "
                             "dimensions only (d = 2 given)");
  }
}

/// Largest dimension accepted by build_mubs.
inline constexpr int kMaxMubDim = 13;

/// The d(d+1) projectors Pi_{b,v} onto the pure stabilizer states, grouped
/// into d+1 mutually unbiased bases. Basis 0 is the computational basis;
/// basis b >= 1 is the eigenbasis of S P^(b-1), with vector v the
/// eigenvector of eigenvalue omega^v. For d = 2 the bases are the Z, X and Y
/// eigenbases in the order {|0>,|1>}, {|+>,|->}, {|+i>,|-i>}.
class MubSet {
 public:
  explicit MubSet(int d) : d_(d) {
    require_prime(d, "build_mubs");
    if (d > kMaxMubDim) {
      throw InvariantViolation("build_mubs: dimension " + std::to_string(d) +
                               " exceeds the supported maximum " + std::to_string(kMaxMubDim));
    }
    const double norm = 1.0 / std::sqrt(double(d));
    vectors_.assign(static_cast<std::size_t>(d + 1), std::vector<CVector>(d));
    for (int v = 0; v < d; ++v) {
      vectors_[0][v] = CVector::Zero(d);
      vectors_[0][v](v) = 1.0;
    }
    if (d == 2) {
      vectors_[1][0] = CVector::Constant(2, norm);
      vectors_[1][1] = CVector(2);
      vectors_[1][1] << norm, -norm;
      vectors_[2][0] = CVector(2);
      vectors_[2][0] << norm, Complex(0, norm);
      vectors_[2][1] = CVector(2);
      vectors_[2][1] << norm, Complex(0, -norm);
    } else {
      for (int b = 1; b <= d; ++b) {
        const long m = b - 1;
        for (int v = 0; v < d; ++v) {
          CVector psi(d);
          for (long k = 0; k < d; ++k) {
            const long e = ((m * (k * (k - 1) / 2) - long(v) * k) % d + d) % d;
            psi(k) = norm * std::polar(1.0, 2.0 * std::numbers::pi * double(e) / d);
          }
          vectors_[b][v] = psi;
        }
      }
    }
    projectors_.assign(static_cast<std::size_t>(d + 1), std::vector<CMatrix>(d));
    for (int b = 0; b <= d; ++b)
      for (int v = 0; v < d; ++v)
        projectors_[b][v] = vectors_[b][v] * vectors_[b][v].adjoint();
    verify();
  }

  int dim() const { return d_; }
  int num_bases() const { return d_ + 1; }
  int size() const { return d_ * (d_ + 1); }

  const CMatrix& projector(int b, int v) const { return projectors_[b][v]; }
  const CVector& vector(int b, int v) const { return vectors_[b][v]; }

  /// Largest deviation of tr(Pi Pi') from the MUB overlap table.
  double overlap_error() const {
    double worst = 0.0;
    for (int b = 0; b <= d_; ++b)
      for (int v = 0; v < d_; ++v)
        for (int b2 = 0; b2 <= d_; ++b2)
          for (int v2 = 0; v2 < d_; ++v2) {
            const double expected = b == b2 ? (v == v2 ? 1.0 : 0.0) : 1.0 / d_;
            const double got = hs_inner(projectors_[b][v], projectors_[b2][v2]);
            worst = std::max(worst, std::abs(got - expected));
          }
    return worst;
  }

 private:
  void verify() const {
    const double err = overlap_error();
    if (err > tol::mub) {
      throw NumericalFailure("build_mubs: overlap table violated by " + std::to_string(err));
    }
    for (int b = 0; b <= d_; ++b)
      for (int v = 0; v < d_; ++v)
        if (std::abs(projectors_[b][v].trace().real() - 1.0) > tol::mub)
          throw NumericalFailure("build_mubs: projector trace is not 1");
  }

  int d_;
  std::vector<std::vector<CVector>> vectors_;
  std::vector<std::vector<CMatrix>> projectors_;
};

inline MubSet build_mubs(int d) { return MubSet(d); }

/// Process-wide shared MUB sets; construction is verified once per d.
inline const MubSet& mub_set(int d) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<MubSet>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(d);
  if (it == cache.end()) it = cache.emplace(d, std::make_unique<MubSet>(d)).first;
  return *it->second;
}

// ---------------------------------------------------------------------------
// Index vectors v in Z_d^(d+1)

/// Lexicographic encoding of v = (v_0, ..., v_d): component b is the digit
/// at position b, v_0 most significant.
class PhasePointIndex {
 public:
  explicit PhasePointIndex(int d) : d_(d), count_(1) {
    for (int b = 0; b <= d; ++b) {
      if (count_ > std::numeric_limits<std::size_t>::max() / std::size_t(d))
        throw InvariantViolation("PhasePointIndex: index set too large");
      count_ *= std::size_t(d);
    }
  }
  std::size_t count() const { return count_; }
  int dim() const { return d_; }

  std::vector<int> decode(std::size_t flat) const {
    std::vector<int> v(static_cast<std::size_t>(d_ + 1));
    for (int b = d_; b >= 0; --b) {
      v[b] = int(flat % std::size_t(d_));
      flat /= std::size_t(d_);
    }
    return v;
  }
  std::size_t encode(const std::vector<int>& v) const {
    std::size_t flat = 0;
    for (int b = 0; b <= d_; ++b) flat = flat * std::size_t(d_) + std::size_t(v[b]);
    return flat;
  }

 private:
  int d_;
  std::size_t count_;
};

/// A_v = sum_b Pi_{b, v_b} - I.
inline CMatrix generalized_phase_point(const MubSet& mubs, const std::vector<int>& v) {
  const int d = mubs.dim();
  CMatrix a = -CMatrix::Identity(d, d);
  for (int b = 0; b <= d; ++b) a += mubs.projector(b, v[b]);
  return a;
}

/// tr(X A_v) for a Hermitian X, evaluated from the per-basis overlaps.
inline double facet_value(const MubSet& mubs, const CMatrix& x, const std::vector<int>& v) {
  double s = -x.trace().real();
  for (int b = 0; b <= mubs.dim(); ++b) s += hs_inner(mubs.projector(b, v[b]), x);
  return s;
}

/// Materializing every generalized operator is limited to d^(d+1) <= this.
inline constexpr std::size_t kMaxMaterializedPhasePoints = 20000;

struct PhasePointSet {
  int dim = 0;
  std::vector<CMatrix> generalized;  // indexed by PhasePointIndex
  std::vector<CMatrix> standard;     // A_{p,q} at p * d + q; empty for d = 2
};

// ---------------------------------------------------------------------------
// Standard (odd-d) phase space

/// omega^k for omega = exp(2 pi i / d), exponent reduced mod d.
inline Complex root_of_unity(int d, long k) {
  const long e = ((k % d) + d) % d;
  return std::polar(1.0, 2.0 * std::numbers::pi * double(e) / d);
}

inline CMatrix shift_operator(int d) {
  CMatrix s = CMatrix::Zero(d, d);
  for (int k = 0; k < d; ++k) s((k + 1) % d, k) = 1.0;
  return s;
}

inline CMatrix phase_operator(int d) {
  CMatrix p = CMatrix::Zero(d, d);
  for (int k = 0; k < d; ++k) p(k, k) = root_of_unity(d, k);
  return p;
}

/// D_{p,q} = omega^(-pq/2) P^p S^q, the half exponent read as the inverse
/// of 2 in Z_d.
inline CMatrix displacement(int d, int p, int q) {
  require_odd_prime(d, "displacement");
  const long inv2 = (d + 1) / 2;
  const long e = -long(p) * q * inv2;
  CMatrix out = CMatrix::Zero(d, d);
  // (P^p S^q)|k> = omega^(p (k+q)) |k+q>
  for (int k = 0; k < d; ++k) {
    const int row = (k + q) % d;
    out(row, k) = root_of_unity(d, e + long(p) * row);
  }
  return out;
}

inline std::vector<CMatrix> standard_phase_points(int d) {
  require_odd_prime(d, "standard_phase_points");
  CMatrix a00 = CMatrix::Zero(d, d);
  std::vector<CMatrix> disp(static_cast<std::size_t>(d) * d);
  for (int p = 0; p < d; ++p)
    for (int q = 0; q < d; ++q) {
      disp[p * d + q] = displacement(d, p, q);
      a00 += disp[p * d + q];
    }
  a00 /= double(d);
  std::vector<CMatrix> out(static_cast<std::size_t>(d) * d);
  for (int i = 0; i < d * d; ++i) {
    const CMatrix a = disp[i] * a00 * disp[i].adjoint();
    out[i] = (a + a.adjoint()) / 2.0;
  }
  return out;
}

/// All d^(d+1) generalized operators, plus the standard ones for odd d.
inline PhasePointSet generalized_phase_points(int d) {
  const MubSet& mubs = mub_set(d);
  const PhasePointIndex index(d);
  if (index.count() > kMaxMaterializedPhasePoints) {
    throw InvariantViolation("generalized_phase_points: d^(d+1) = " +
                             std::to_string(index.count()) + " operators is too many to store");
  }
  PhasePointSet set;
  set.dim = d;
  set.generalized.reserve(index.count());
  for (std::size_t i = 0; i < index.count(); ++i)
    set.generalized.push_back(generalized_phase_point(mubs, index.decode(i)));
  if (d != 2) set.standard = standard_phase_points(d);
  return set;
}

// ---------------------------------------------------------------------------
// Wigner function

struct WignerTable {
  int dim = 0;
  RMatrix values;  // values(p, q)

  double sum() const { return values.sum(); }
  double negativity() const {
    double s = 0.0;
    for (Eigen::Index i = 0; i < values.size(); ++i) s += std::max(0.0, -values.data()[i]);
    return s;
  }
};

/// W_{p,q} = tr(rho A_{p,q}) / d, normalized so that the table sums to 1.
inline WignerTable wigner(const CMatrix& rho) {
  const int d = static_cast<int>(rho.rows());
  require_odd_prime(d, "wigner");
  static std::mutex mutex;
  static std::map<int, std::vector<CMatrix>> cache;
  std::vector<CMatrix> const* ops = nullptr;
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(d);
    if (it == cache.end()) it = cache.emplace(d, standard_phase_points(d)).first;
    ops = &it->second;
  }
  WignerTable w;
  w.dim = d;
  w.values.resize(d, d);
  for (int p = 0; p < d; ++p)
    for (int q = 0; q < d; ++q) w.values(p, q) = hs_inner((*ops)[p * d + q], rho) / d;
  return w;
}

inline WignerTable wigner(const DensityMatrix& rho) { return wigner(rho.matrix()); }

/// Sum of the magnitudes of the negative Wigner entries.
inline double sum_negativity(const DensityMatrix& rho) { return wigner(rho).negativity(); }

// ---------------------------------------------------------------------------
// Polytope membership

struct StabilizerReport {
  bool stabilizer = false;
  std::vector<int> worst_v;  // minimizing index vector
  double worst_value = 0.0;  // tr(rho A_v) at worst_v
};

/// Facet test: rho is a stabilizer state iff tr(rho A_v) >= 0 for every v.
/// The minimum over v separates into a per-basis minimum because A_v is a
/// sum of one projector from each basis.
inline StabilizerReport is_stabilizer(const CMatrix& rho, double tolerance = tol::membership) {
  const int d = static_cast<int>(rho.rows());
  const MubSet& mubs = mub_set(d);
  StabilizerReport r;
  r.worst_v.resize(static_cast<std::size_t>(d + 1));
  double total = -rho.trace().real();
  for (int b = 0; b <= d; ++b) {
    double best = std::numeric_limits<double>::infinity();
    for (int u = 0; u < d; ++u) {
      const double val = hs_inner(mubs.projector(b, u), rho);
      if (val < best) {
        best = val;
        r.worst_v[b] = u;
      }
    }
    total += best;
  }
  r.worst_value = total;
  r.stabilizer = total >= -tolerance;
  return r;
}

inline StabilizerReport is_stabilizer(const DensityMatrix& rho,
                                      double tolerance = tol::membership) {
  return is_stabilizer(rho.matrix(), tolerance);
}

}  // namespace magic
