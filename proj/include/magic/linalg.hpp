#pragma once

// Dense complex-matrix foundation: strong types for Hermitian operators and
// density matrices, tensor products, partial traces and operator bases.
//
// Tensor convention: in a product space A (x) B the first factor is the
// major index, i.e. basis state |i>|k> has flat index i * dim(B) + k. Choi
// matrices live on output (x) input.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "jacobi.hpp"
#include "tolerances.hpp"

namespace magic {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline double max_abs(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

inline double hermiticity_error(const CMatrix& m) {
  return max_abs(m - m.adjoint());
}

/// A square complex matrix equal to its adjoint within tol::hermitian.
/// The stored matrix is exactly symmetrized.
class Hermitian {
 public:
  Hermitian() = default;

  explicit Hermitian(const CMatrix& m, double tolerance = tol::hermitian) {
    if (m.rows() != m.cols() || m.rows() == 0) {
      throw DimensionMismatch("Hermitian: matrix must be square and non-empty");
    }
    if (!m.allFinite()) {
      throw InvariantViolation("Hermitian: non-finite entry");
    }
    const double err = hermiticity_error(m);
    if (err > tolerance) {
      throw InvariantViolation("Hermitian: ||A - A^dagger||_max = " + std::to_string(err));
    }
    m_ = (m + m.adjoint()) / 2.0;
  }

  /// Symmetrizes without checking; for values produced by trusted arithmetic.
  static Hermitian symmetrize(const CMatrix& m) {
    Hermitian h;
    h.m_ = (m + m.adjoint()) / 2.0;
    return h;
  }

  static Hermitian identity(int dim) { return symmetrize(CMatrix::Identity(dim, dim)); }

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }
  Complex operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  double trace() const { return m_.trace().real(); }

  friend Hermitian operator+(const Hermitian& a, const Hermitian& b) {
    return symmetrize(a.m_ + b.m_);
  }
  friend Hermitian operator-(const Hermitian& a, const Hermitian& b) {
    return symmetrize(a.m_ - b.m_);
  }
  friend Hermitian operator*(double s, const Hermitian& a) { return symmetrize(s * a.m_); }

 private:
  CMatrix m_;
};

/// Positive semidefinite, unit-trace Hermitian operator.
class DensityMatrix {
 public:
  DensityMatrix() = default;

  explicit DensityMatrix(const Hermitian& h, double tolerance = tol::density_trace) : h_(h) {
    const double tr = h.trace();
    if (std::abs(tr - 1.0) > tolerance) {
      throw InvariantViolation("DensityMatrix: trace " + std::to_string(tr) + " != 1");
    }
    const double lmin = min_eigenvalue(h.matrix());
    if (lmin < -std::max(tolerance, tol::density_psd)) {
      throw InvariantViolation("DensityMatrix: minimum eigenvalue " + std::to_string(lmin) +
                               " < 0");
    }
  }

  explicit DensityMatrix(const CMatrix& m, double tolerance = tol::density_trace)
      : DensityMatrix(Hermitian(m), tolerance) {}

  static DensityMatrix maximally_mixed(int dim) {
    return DensityMatrix(Hermitian::symmetrize(CMatrix::Identity(dim, dim) / double(dim)));
  }

  /// |psi><psi| for a (not necessarily normalized) non-zero vector.
  static DensityMatrix pure(const CVector& psi) {
    const double n = psi.norm();
    if (n == 0.0) throw InvariantViolation("DensityMatrix::pure: zero vector");
    const CVector u = psi / n;
    return DensityMatrix(Hermitian::symmetrize(u * u.adjoint()));
  }

  int dim() const { return h_.dim(); }
  const Hermitian& hermitian() const { return h_; }
  const CMatrix& matrix() const { return h_.matrix(); }
  Complex operator()(Eigen::Index i, Eigen::Index j) const { return h_(i, j); }

 private:
  Hermitian h_;
};

// ---------------------------------------------------------------------------
// Products and partial traces

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Hermitian kron(const Hermitian& a, const Hermitian& b) {
  return Hermitian::symmetrize(kron(a.matrix(), b.matrix()));
}

enum class Keep { A, B };

/// Partial trace of an operator on A (x) B, keeping one factor.
inline CMatrix partial_trace(const CMatrix& m, int dim_a, int dim_b, Keep keep) {
  if (m.rows() != Eigen::Index(dim_a) * dim_b || m.cols() != m.rows()) {
    throw DimensionMismatch("partial_trace: operator is " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()) + ", expected dimension " +
                            std::to_string(dim_a * dim_b));
  }
  if (keep == Keep::A) {
    CMatrix out = CMatrix::Zero(dim_a, dim_a);
    for (int i = 0; i < dim_a; ++i)
      for (int j = 0; j < dim_a; ++j)
        for (int k = 0; k < dim_b; ++k) out(i, j) += m(i * dim_b + k, j * dim_b + k);
    return out;
  }
  CMatrix out = CMatrix::Zero(dim_b, dim_b);
  for (int k = 0; k < dim_b; ++k)
    for (int l = 0; l < dim_b; ++l)
      for (int i = 0; i < dim_a; ++i) out(k, l) += m(i * dim_b + k, i * dim_b + l);
  return out;
}

inline Hermitian partial_trace(const Hermitian& m, int dim_a, int dim_b, Keep keep) {
  return Hermitian::symmetrize(partial_trace(m.matrix(), dim_a, dim_b, keep));
}

/// Hilbert-Schmidt inner product Re tr(A^dagger B); both operands Hermitian
/// in every use, where this is the real trace of the product.
inline double hs_inner(const CMatrix& a, const CMatrix& b) {
  return (a.conjugate().cwiseProduct(b)).sum().real();
}

inline Spectrum<Complex> eig_hermitian(const Hermitian& h) { return jacobi_eigen(h.matrix()); }

inline bool is_psd(const Hermitian& h, double tolerance) {
  return min_eigenvalue(h.matrix()) >= -tolerance;
}

/// Orthonormal (Hilbert-Schmidt) basis of the n x n Hermitian matrices:
/// element 0 is I/sqrt(n), the remaining n^2 - 1 elements are traceless
/// (symmetric and antisymmetric off-diagonal units, then the generalized
/// Gell-Mann diagonal matrices).
inline std::vector<CMatrix> hermitian_basis(int n) {
  std::vector<CMatrix> basis;
  basis.reserve(static_cast<std::size_t>(n) * n);
  basis.push_back(CMatrix::Identity(n, n) / std::sqrt(double(n)));
  const double r = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      CMatrix s = CMatrix::Zero(n, n);
      s(i, j) = s(j, i) = r;
      basis.push_back(s);
      CMatrix a = CMatrix::Zero(n, n);
      a(i, j) = Complex(0, -r);
      a(j, i) = Complex(0, r);
      basis.push_back(a);
    }
  }
  for (int k = 1; k < n; ++k) {
    CMatrix g = CMatrix::Zero(n, n);
    const double c = 1.0 / std::sqrt(double(k) * (k + 1));
    for (int i = 0; i < k; ++i) g(i, i) = c;
    g(k, k) = -double(k) * c;
    basis.push_back(g);
  }
  return basis;
}

/// Real-symmetric embedding [[Re, -Im], [Im, Re]] of a Hermitian matrix.
/// Positive semidefiniteness is preserved and every eigenvalue doubles.
inline RMatrix realify(const CMatrix& h) {
  const Eigen::Index n = h.rows();
  RMatrix r(2 * n, 2 * n);
  r.topLeftCorner(n, n) = h.real();
  r.topRightCorner(n, n) = -h.imag();
  r.bottomLeftCorner(n, n) = h.imag();
  r.bottomRightCorner(n, n) = h.real();
  return r;
}

inline RMatrix realify(const Hermitian& h) { return realify(h.matrix()); }

/// Inverse of realify for matrices that need not carry the exact block
/// structure: returns the Hermitian matrix whose embedding is the
/// structured projection of r.
inline CMatrix derealify(const RMatrix& r) {
  const Eigen::Index n = r.rows() / 2;
  const RMatrix re = (r.topLeftCorner(n, n) + r.bottomRightCorner(n, n)) / 2.0;
  const RMatrix im = (r.bottomLeftCorner(n, n) - r.topRightCorner(n, n)) / 2.0;
  CMatrix h(n, n);
  h.real() = re;
  h.imag() = im;
  return (h + h.adjoint()) / 2.0;
}

/// Matrix transpose (not conjugate).
inline CMatrix transpose(const CMatrix& m) { return m.transpose(); }

}  // namespace magic
