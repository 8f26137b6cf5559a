#pragma once

// Cyclic Jacobi eigensolver for real-symmetric and complex-Hermitian
// matrices. The problem sizes in this library are tiny (n <= ~40), where
// Jacobi is both accurate and simple to reason about.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <type_traits>
#include <vector>

#include "errors.hpp"
#include "tolerances.hpp"

namespace magic {

namespace detail {

template <typename T>
struct is_complex : std::false_type {};
template <typename T>
struct is_complex<std::complex<T>> : std::true_type {};

template <typename Scalar>
inline Scalar conj_of(const Scalar& x) {
  if constexpr (is_complex<Scalar>::value) {
    return std::conj(x);
  } else {
    return x;
  }
}

template <typename Scalar>
inline double real_of(const Scalar& x) {
  if constexpr (is_complex<Scalar>::value) {
    return x.real();
  } else {
    return x;
  }
}

}  // namespace detail

/// Eigen-decomposition of a self-adjoint matrix: eigenvalues ascending,
/// eigenvectors stored as the matching orthonormal columns.
template <typename Scalar>
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> eigenvectors;

  double min() const { return eigenvalues.size() ? eigenvalues(0) : 0.0; }
  double max() const {
    return eigenvalues.size() ? eigenvalues(eigenvalues.size() - 1) : 0.0;
  }
};

/// Eigen-decomposition by cyclic Jacobi rotations. Only the lower/upper
/// Hermitian part is assumed consistent; the input is symmetrized first.
/// Throws NumericalFailure if `max_sweeps` sweeps do not converge.
template <typename Derived>
Spectrum<typename Derived::Scalar> jacobi_eigen(const Eigen::MatrixBase<Derived>& input,
                                                int max_sweeps = tol::jacobi_max_sweeps) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = input.rows();
  if (input.cols() != n) {
    throw DimensionMismatch("jacobi_eigen: matrix is not square");
  }
  Mat a = (input + input.adjoint()) / 2.0;
  Mat v = Mat::Identity(n, n);

  const double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
  const double eps = std::numeric_limits<double>::epsilon();

  auto off_norm = [&]() {
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < j; ++i) s += std::norm(a(i, j));
    return std::sqrt(2.0 * s);
  };

  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    if (off_norm() <= eps * scale) break;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Scalar apq = a(p, q);
        const double g = std::abs(apq);
        if (g <= 1e-3 * eps * scale) {
          a(p, q) = Scalar(0);
          a(q, p) = Scalar(0);
          continue;
        }
        const Scalar phase = apq / g;
        const double app = detail::real_of(a(p, p));
        const double aqq = detail::real_of(a(q, q));
        const double theta = (aqq - app) / (2.0 * g);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // Column rotation by U = [[c, s], [-s*conj(phase), c*conj(phase)]].
        const Scalar pc = detail::conj_of(phase);
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar akp = a(k, p);
          const Scalar akq = a(k, q);
          a(k, p) = c * akp - s * pc * akq;
          a(k, q) = s * akp + c * pc * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar apk = a(p, k);
          const Scalar aqk = a(q, k);
          a(p, k) = c * apk - s * phase * aqk;
          a(q, k) = s * apk + c * phase * aqk;
        }
        a(p, q) = Scalar(0);
        a(q, p) = Scalar(0);
        a(p, p) = Scalar(app - t * g);
        a(q, q) = Scalar(aqq + t * g);
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar vkp = v(k, p);
          const Scalar vkq = v(k, q);
          v(k, p) = c * vkp - s * pc * vkq;
          v(k, q) = s * vkp + c * pc * vkq;
        }
      }
    }
  }
  if (sweep == max_sweeps && off_norm() > eps * scale * 10.0) {
    throw NumericalFailure("jacobi_eigen: no convergence after " +
                           std::to_string(max_sweeps) + " sweeps");
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return detail::real_of(a(i, i)) < detail::real_of(a(j, j));
  });
  Spectrum<Scalar> out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = detail::real_of(a(order[k], order[k]));
    out.eigenvectors.col(k) = v.col(order[k]);
  }
  return out;
}

template <typename Derived>
double min_eigenvalue(const Eigen::MatrixBase<Derived>& m) {
  return jacobi_eigen(m).min();
}

template <typename Derived>
double max_eigenvalue(const Eigen::MatrixBase<Derived>& m) {
  return jacobi_eigen(m).max();
}

}  // namespace magic
