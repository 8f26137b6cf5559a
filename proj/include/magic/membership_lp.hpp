#pragma once

// Polytope membership as a linear program: rho is a stabilizer state iff it
// is a convex combination of the d(d+1) pure stabilizer projectors. Used as
// an independent check of the facet test in is_stabilizer.

#include <string>

#include "sdp.hpp"
#include "stabilizer.hpp"

namespace magic {

struct LpMembership {
  bool stabilizer = false;
  RVector weights;  // over (b, v), b-major; meaningful when stabilizer
  sdp::SdpSolution solution;
};

inline LpMembership stabilizer_lp(const CMatrix& rho) {
  const int d = static_cast<int>(rho.rows());
  const MubSet& m = mub_set(d);
  sdp::SdpProblem p;
  const auto w = p.add_nonneg_block(m.size());
  for (const auto& e : hermitian_basis(d)) {
    sdp::LinearFunctional f;
    for (int b = 0; b <= d; ++b)
      for (int v = 0; v < d; ++v) f.add(w, b * d + v, hs_inner(e, m.projector(b, v)));
    p.add_equality(std::move(f), hs_inner(e, rho));
  }
  LpMembership r;
  r.solution = sdp::feasibility(p);
  switch (r.solution.status) {
    case sdp::Status::FeasiblePoint:
      r.stabilizer = true;
      r.weights = r.solution.primal[w].scalars;
      return r;
    case sdp::Status::Infeasible:
      r.stabilizer = false;
      return r;
    default:
      throw NumericalFailure("is_stabilizer_lp: " + r.solution.message);
  }
}

inline bool is_stabilizer_lp(const DensityMatrix& rho) {
  return stabilizer_lp(rho.matrix()).stabilizer;
}

}  // namespace magic
