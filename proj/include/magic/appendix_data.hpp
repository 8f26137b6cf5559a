#pragma once

// Worked qutrit example printed to four decimals: an input state rho with a
// non-negative Wigner function, a target rho' with sum negativity 0.0074 and a
// stabilizer-preserving Choi matrix J = J_re + i J_im converting one into the
// other. J is stored on output (x) input.

#include "linalg.hpp"

namespace magic::appendix {

inline constexpr double kRhoRe[3][3] = {
    { 0.1913,  0.0580,  0.1383},
    { 0.0580,  0.4585, -0.0292},
    { 0.1383, -0.0292,  0.3502},
};

inline constexpr double kRhoIm[3][3] = {
    { 0.0000, -0.1002,  0.1163},
    { 0.1002,  0.0000, -0.0897},
    {-0.1163,  0.0897,  0.0000},
};

inline constexpr double kRhopRe[3][3] = {
    { 0.2383,  0.0413, -0.0286},
    { 0.0413,  0.4894,  0.1650},
    {-0.0286,  0.1650,  0.2723},
};

inline constexpr double kRhopIm[3][3] = {
    { 0.0000,  0.0808, -0.0380},
    {-0.0808,  0.0000, -0.0552},
    { 0.0380,  0.0552,  0.0000},
};

inline constexpr double kJRe[9][9] = {
    { 0.3841, -0.0380, -0.0629, -0.0173, -0.0242,  0.0782,  0.0270, -0.0073, -0.0597},
    {-0.0380,  0.2577,  0.0535,  0.0516,  0.0313, -0.0470, -0.0406, -0.0232,  0.0114},
    {-0.0629,  0.0535,  0.2688, -0.0287,  0.0285,  0.0243, -0.0013, -0.0241, -0.0081},
    {-0.0173,  0.0516, -0.0287,  0.2935,  0.0442,  0.0853, -0.0711,  0.0901,  0.0663},
    {-0.0242,  0.0313,  0.0285,  0.0442,  0.4680, -0.0595,  0.0460,  0.1288, -0.0375},
    { 0.0782, -0.0470,  0.0243,  0.0853, -0.0595,  0.4349,  0.1283, -0.0815,  0.1109},
    { 0.0270, -0.0406, -0.0013, -0.0711,  0.0460,  0.1283,  0.3224, -0.0062, -0.0224},
    {-0.0073, -0.0232, -0.0241,  0.0901,  0.1288, -0.0815, -0.0062,  0.2742,  0.0060},
    {-0.0597,  0.0114, -0.0081,  0.0663, -0.0375,  0.1109, -0.0224,  0.0060,  0.2964},
};

inline constexpr double kJIm[9][9] = {
    { 0.0000, -0.0318,  0.0458, -0.0795,  0.0678,  0.0427,  0.0641, -0.0562, -0.0273},
    { 0.0318,  0.0000, -0.0306,  0.0295,  0.0548, -0.0241, -0.0270, -0.0188,  0.0147},
    {-0.0458,  0.0306,  0.0000,  0.0902, -0.0621,  0.0500, -0.0629,  0.0406, -0.0269},
    { 0.0795, -0.0295, -0.0902,  0.0000,  0.0508, -0.0664,  0.0425,  0.0302, -0.1252},
    {-0.0678, -0.0548,  0.0621, -0.0508,  0.0000,  0.0475, -0.0945, -0.0393,  0.0826},
    {-0.0427,  0.0241, -0.0500,  0.0664, -0.0475,  0.0000,  0.0398, -0.0373, -0.0368},
    {-0.0641,  0.0270,  0.0629, -0.0425,  0.0945, -0.0398,  0.0000, -0.0190,  0.0205},
    { 0.0562,  0.0188, -0.0406, -0.0302,  0.0393,  0.0373,  0.0190,  0.0000, -0.0169},
    { 0.0273, -0.0147,  0.0269,  0.1252, -0.0826,  0.0368, -0.0205,  0.0169,  0.0000},
};

template <std::size_t N>
inline CMatrix assemble(const double (&re)[N][N], const double (&im)[N][N]) {
  CMatrix m(N, N);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) m(i, j) = Complex(re[i][j], im[i][j]);
  return m;
}

inline DensityMatrix rho() { return DensityMatrix(assemble(kRhoRe, kRhoIm), tol::printed_matrix); }
inline DensityMatrix rho_prime() {
  return DensityMatrix(assemble(kRhopRe, kRhopIm), tol::printed_matrix);
}
inline CMatrix choi() { return assemble(kJRe, kJIm); }

}  // namespace magic::appendix
