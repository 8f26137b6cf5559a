#pragma once

// Absolute tolerances shared by every module. Every matrix handled by the
// library has entries bounded by the Hilbert-space dimension, so absolute
// comparisons are used throughout.

namespace magic::tol {

inline constexpr double hermitian = 1e-12;       // ||A - A^dagger||_max
inline constexpr double density_trace = 1e-9;    // |tr(rho) - 1|
inline constexpr double density_psd = 1e-9;      // minimum eigenvalue floor
inline constexpr double eig_residual = 1e-9;     // ||A v - lambda v|| relative to ||A||
inline constexpr int jacobi_max_sweeps = 100;

inline constexpr double bloch = 1e-12;
inline constexpr double mub = 1e-10;             // MUB overlap table
inline constexpr double phase_point = 1e-9;      // phase-point inner products
inline constexpr double membership = 1e-9;       // facet inequalities tr(rho A_v) >= -tol
inline constexpr double oracle_band = 1e-7;      // facet-vs-LP agreement band

inline constexpr double choi_psd = 1e-9;
inline constexpr double choi_tp = 1e-8;
inline constexpr double spo_inequality = 1e-8;
inline constexpr double povm = 1e-10;
inline constexpr double channel_trace = 1e-6;    // output trace of apply_channel

inline constexpr double sdp_primal_residual = 1e-7;
inline constexpr double sdp_relative_gap = 1e-6;
inline constexpr double feasible_slack = 1e-8;   // phase-I accept threshold
inline constexpr double infeasible_slack = 1e-7; // phase-I reject threshold
inline constexpr double ray_margin = 1e-9;

inline constexpr double conversion_map = 1e-6;   // ||E(rho) - rho'||_max
inline constexpr double witness_margin = 1e-8;
inline constexpr double lemma2 = 1e-9;
inline constexpr double monotone_order = 1e-6;

// The appendix matrices are printed with four decimals.
inline constexpr double printed_matrix = 5e-3;

}  // namespace magic::tol
