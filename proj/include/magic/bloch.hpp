#pragma once

#include <array>
#include <cmath>
#include <string>

#include "linalg.hpp"

namespace magic {

namespace pauli {
inline CMatrix x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline CMatrix y() {
  CMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}
inline CMatrix z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
}  // namespace pauli

using BlochVector = std::array<double, 3>;

/// rho = (I + x X + y Y + z Z) / 2 for a point of the Bloch ball.
inline DensityMatrix bloch_to_density(double x, double y, double z) {
  const double r2 = x * x + y * y + z * z;
  if (r2 > 1.0 + 1e-12) {
    throw InvariantViolation("bloch_to_density: |r|^2 = " + std::to_string(r2) + " > 1");
  }
  const CMatrix m =
      (CMatrix::Identity(2, 2) + x * pauli::x() + y * pauli::y() + z * pauli::z()) / 2.0;
  return DensityMatrix(Hermitian::symmetrize(m));
}

inline DensityMatrix bloch_to_density(const BlochVector& r) {
  return bloch_to_density(r[0], r[1], r[2]);
}

/// Bloch coordinates (tr(rho X), tr(rho Y), tr(rho Z)) of any unit-trace
/// qubit operator.
inline BlochVector density_to_bloch(const CMatrix& rho) {
  if (rho.rows() != 2 || rho.cols() != 2) {
    throw DimensionMismatch("density_to_bloch: Bloch coordinates need a qubit (d = 2)");
  }
  return {hs_inner(pauli::x(), rho), hs_inner(pauli::y(), rho), hs_inner(pauli::z(), rho)};
}

inline BlochVector density_to_bloch(const DensityMatrix& rho) {
  return density_to_bloch(rho.matrix());
}

namespace states {

/// Type-T magic state, Bloch vector (1,1,1)/sqrt(3).
inline DensityMatrix t_state() {
  const double c = 1.0 / std::sqrt(3.0);
  return bloch_to_density(c, c, c);
}

/// Type-H magic state, Bloch vector (1,0,1)/sqrt(2).
inline DensityMatrix h_state() {
  const double c = 1.0 / std::sqrt(2.0);
  return bloch_to_density(c, 0.0, c);
}

/// (1 - alpha) I/2 + alpha |T><T|: the segment from the maximally mixed
/// state to the T state.
inline DensityMatrix t_line(double alpha) {
  const double c = alpha / std::sqrt(3.0);
  return bloch_to_density(c, c, c);
}

inline DensityMatrix basis_state(int dim, int k) {
  CVector v = CVector::Zero(dim);
  v(k) = 1.0;
  return DensityMatrix::pure(v);
}

}  // namespace states

}  // namespace magic
