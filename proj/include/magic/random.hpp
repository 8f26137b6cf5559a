#pragma once

// Seeded generators for property tests: random states, stabilizer mixtures
// and measure-and-prepare stabilizer-preserving channels.

#include <random>
#include <vector>

#include "channels.hpp"
#include "linalg.hpp"
#include "stabilizer.hpp"

namespace magic::random {

using Rng = std::mt19937_64;

inline CMatrix ginibre(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k) g(i, k) = Complex(n(rng), n(rng));
  return g;
}

inline Hermitian hermitian(int d, Rng& rng) {
  const CMatrix g = ginibre(d, d, rng);
  return Hermitian::symmetrize(g + g.adjoint());
}

/// Haar-random pure state.
inline DensityMatrix pure_state(int d, Rng& rng) {
  return DensityMatrix::pure(ginibre(d, 1, rng).col(0));
}

/// Hilbert-Schmidt random mixed state (full rank almost surely).
inline DensityMatrix mixed_state(int d, Rng& rng) {
  const CMatrix g = ginibre(d, d, rng);
  const CMatrix r = g * g.adjoint();
  return DensityMatrix(Hermitian::symmetrize(r / r.trace().real()));
}

/// Uniform point of the probability simplex.
inline std::vector<double> simplex(int n, Rng& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(static_cast<std::size_t>(n));
  double s = 0.0;
  for (auto& x : w) s += (x = e(rng));
  for (auto& x : w) x /= s;
  return w;
}

/// Random convex mixture of pure stabilizer states.
inline DensityMatrix stabilizer_state(int d, Rng& rng) {
  const MubSet& m = mub_set(d);
  const auto w = simplex(m.size(), rng);
  CMatrix r = CMatrix::Zero(d, d);
  for (int b = 0; b <= d; ++b)
    for (int v = 0; v < d; ++v) r += w[std::size_t(b * d + v)] * m.projector(b, v);
  return DensityMatrix(Hermitian::symmetrize(r));
}

/// Measure in a random mixture of MUB measurements and prepare random
/// stabilizer states: E(rho) = sum_{b,v} q_b tr(rho Pi_{b,v}) sigma_{b,v}.
inline ChoiMatrix measure_prepare_channel(int dim_in, int dim_out, Rng& rng) {
  const MubSet& m = mub_set(dim_in);
  const auto q = simplex(dim_in + 1, rng);
  std::vector<CMatrix> povm;
  std::vector<DensityMatrix> prepares;
  for (int b = 0; b <= dim_in; ++b)
    for (int v = 0; v < dim_in; ++v) {
      povm.push_back(q[std::size_t(b)] * m.projector(b, v));
      prepares.push_back(stabilizer_state(dim_out, rng));
    }
  return choi_measure_prepare(povm, prepares);
}

}  // namespace magic::random
