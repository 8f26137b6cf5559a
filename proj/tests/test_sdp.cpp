#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "magic/sdp.hpp"

using namespace magic;
using namespace magic::sdp;

TEST(Sdp, ScalarBlockTrace) {
  SdpProblem p;
  auto b = p.add_psd_block(1);
  p.add_equality(LinearFunctional().add(b, CMatrix::Identity(1, 1)), 5.0);
  p.set_objective(LinearFunctional().add(b, CMatrix::Identity(1, 1)));
  auto s = solve(p);
  EXPECT_EQ(s.status, Status::Optimal) << s.message;
  EXPECT_NEAR(s.objective, 5.0, 1e-8);
}

TEST(Sdp, MaximallyEntangledQ) {
  // min tr S  s.t.  I (x) S - Z = phi+,  S, Z >= 0.
  const int d = 2;
  CMatrix phi = CMatrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) phi(i * d + i, j * d + j) = 1.0 / d;
  SdpProblem p;
  auto S = p.add_psd_block(d);
  auto Z = p.add_psd_block(d * d);
  for (const auto& e : hermitian_basis(d * d)) {
    LinearFunctional f;
    f.add(S, partial_trace(e, d, d, Keep::B));
    f.add(Z, -e);
    p.add_equality(f, hs_inner(e, phi));
  }
  p.set_objective(LinearFunctional().add(S, CMatrix::Identity(d, d)));
  auto s = solve(p);
  ASSERT_EQ(s.status, Status::Optimal) << s.message;
  EXPECT_NEAR(s.objective, 2.0, 1e-7);
  EXPECT_NEAR(s.dual_objective, 2.0, 1e-7);
}

TEST(Sdp, InconsistentScalars) {
  SdpProblem p;
  auto x = p.add_nonneg_block(1);
  p.add_equality(LinearFunctional().add(x, 0, 1.0), 1.0);
  p.add_equality(LinearFunctional().add(x, 0, 1.0), 2.0);
  auto s = feasibility(p);
  ASSERT_EQ(s.status, Status::Infeasible);
  const DualRay r = extract_dual_ray(s);
  EXPECT_NEAR(r.multipliers(0) / r.multipliers(1), -1.0, 1e-12);
  EXPECT_GT(r.margin, 0.0);
}

TEST(Sdp, NegativeTrace) {
  SdpProblem p;
  auto b = p.add_psd_block(2);
  p.add_equality(LinearFunctional().add(b, CMatrix::Identity(2, 2)), -1.0);
  auto s = feasibility(p);
  ASSERT_EQ(s.status, Status::Infeasible) << s.message;
  EXPECT_GE(extract_dual_ray(s).margin, 1e-8);
  auto t = solve(p);
  EXPECT_EQ(t.status, Status::Infeasible) << t.message;
}

TEST(Sdp, UnitTraceFeasible) {
  SdpProblem p;
  auto b = p.add_psd_block(3);
  p.add_equality(LinearFunctional().add(b, CMatrix::Identity(3, 3)), 1.0);
  auto s = feasibility(p);
  ASSERT_EQ(s.status, Status::FeasiblePoint) << s.message << " slack " << s.phase_one_slack;
  EXPECT_GE(min_eigenvalue(s.primal[b].psd), -1e-9);
  EXPECT_NEAR(s.primal[b].psd.trace().real(), 1.0, 1e-8);
}

TEST(Sdp, MaximizeFlipsSense) {
  // max x0 + 2 x1 s.t. x0 + x1 = 1, x >= 0  ->  2.
  SdpProblem p;
  auto x = p.add_nonneg_block(2);
  p.add_equality(LinearFunctional().add(x, 0, 1.0).add(x, 1, 1.0), 1.0);
  p.set_objective(LinearFunctional().add(x, 0, 1.0).add(x, 1, 2.0), Sense::Maximize);
  auto s = solve(p);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.objective, 2.0, 1e-8);
  EXPECT_NEAR(s.primal[x].scalars(1), 1.0, 1e-7);
}

TEST(Sdp, ValidateRejectsMalformed) {
  SdpProblem p;
  auto b = p.add_psd_block(2);
  p.add_equality(LinearFunctional().add(b, CMatrix::Identity(3, 3)), 1.0);
  EXPECT_THROW(p.validate(), InvariantViolation);
  SdpProblem q;
  auto c = q.add_psd_block(2);
  CMatrix m(2, 2);
  m << 0, 1, 0, 0;
  q.add_equality(LinearFunctional().add(c, m), 1.0);
  EXPECT_THROW(q.validate(), InvariantViolation);
  SdpProblem r;
  auto x = r.add_nonneg_block(1);
  r.add_equality(LinearFunctional().add(x, 3, 1.0), 1.0);
  EXPECT_THROW(r.validate(), InvariantViolation);
  EXPECT_THROW(SdpProblem().validate(), InvariantViolation);
  EXPECT_THROW(SdpProblem().add_psd_block(0), InvariantViolation);
}

TEST(Sdp, RedundantEqualitiesAreHarmless) {
  SdpProblem p;
  auto b = p.add_psd_block(2);
  for (int k = 0; k < 3; ++k) p.add_equality(LinearFunctional().add(b, CMatrix::Identity(2, 2)), 1.0);
  CMatrix z(2, 2);
  z << 1, 0, 0, -1;
  p.set_objective(LinearFunctional().add(b, z));
  auto s = solve(p);
  ASSERT_EQ(s.status, Status::Optimal) << s.message;
  EXPECT_NEAR(s.objective, -1.0, 1e-8);
}

TEST(Sdp, RayScaleInvariance) {
  SdpProblem p;
  auto x = p.add_nonneg_block(1);
  p.add_equality(LinearFunctional().add(x, 0, 1.0), 1.0);
  p.add_equality(LinearFunctional().add(x, 0, 1.0), 2.0);
  RVector y(2);
  y << -1.0, 1.0;
  const DualRay a = assess_ray(p, y), b = assess_ray(p, 2.0 * y);
  EXPECT_GT(a.margin, 0.0);
  EXPECT_NEAR(a.margin, b.margin, 1e-15);
  EXPECT_LT((a.multipliers - b.multipliers).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(a.cone_violation, 0.0);
}

TEST(Sdp, ExtractRayRequiresInfeasible) {
  SdpProblem p;
  auto b = p.add_psd_block(1);
  p.add_equality(LinearFunctional().add(b, CMatrix::Identity(1, 1)), 1.0);
  EXPECT_THROW(extract_dual_ray(feasibility(p)), InvariantViolation);
}

namespace {

// Brute-force LP oracle: min c'x, A x = b, x >= 0 by enumerating bases.
double lp_by_vertices(const RMatrix& A, const RVector& b, const RVector& c, bool& feasible) {
  const int m = int(A.rows()), n = int(A.cols());
  double best = std::numeric_limits<double>::infinity();
  feasible = false;
  std::vector<int> pick(m);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == m) {
      RMatrix B(m, m);
      for (int k = 0; k < m; ++k) B.col(k) = A.col(pick[k]);
      Eigen::FullPivLU<RMatrix> lu(B);
      if (lu.rank() < m) return;
      const RVector xb = lu.solve(b);
      if (xb.minCoeff() < -1e-12) return;
      feasible = true;
      double v = 0;
      for (int k = 0; k < m; ++k) v += c(pick[k]) * xb(k);
      best = std::min(best, v);
      return;
    }
    for (int j = start; j < n; ++j) {
      pick[depth] = j;
      rec(j + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

}  // namespace

TEST(Sdp, DiagonalInstancesMatchVertexEnumeration) {
  // A PSD block with diagonal data behaves like an LP over its diagonal.
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1, 1);
  int checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 1 + trial % 3, n = m + 1 + trial % 6;
    RMatrix A(m, n);
    RVector c(n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = u(rng);
    A.row(0).setOnes();  // bounded feasible region
    for (int j = 0; j < n; ++j) c(j) = u(rng);
    RVector x0(n);
    for (int j = 0; j < n; ++j) x0(j) = 0.5 + 0.5 * (u(rng) + 1);
    const RVector b = A * x0;  // strictly feasible
    bool feasible = false;
    const double oracle = lp_by_vertices(A, b, c, feasible);
    ASSERT_TRUE(feasible);

    SdpProblem p;
    auto blk = p.add_psd_block(n);
    for (int i = 0; i < m; ++i) {
      CMatrix a = CMatrix::Zero(n, n);
      for (int j = 0; j < n; ++j) a(j, j) = A(i, j);
      p.add_equality(LinearFunctional().add(blk, a), b(i));
    }
    CMatrix cm = CMatrix::Zero(n, n);
    for (int j = 0; j < n; ++j) cm(j, j) = c(j);
    p.set_objective(LinearFunctional().add(blk, cm));
    const SdpSolution s = solve(p);
    ASSERT_EQ(s.status, Status::Optimal) << "trial " << trial << ": " << s.message;
    EXPECT_NEAR(s.objective, oracle, 1e-6 * (1 + std::abs(oracle))) << "trial " << trial;
    EXPECT_LE(s.dual_objective, s.objective + 1e-8);
    EXPECT_LE(s.primal_residual, 1e-7);
    ++checked;
  }
  EXPECT_EQ(checked, 50);
}

TEST(Sdp, Deterministic) {
  SdpProblem p;
  auto s_blk = p.add_psd_block(3);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  for (int k = 0; k < 4; ++k) {
    CMatrix g(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) g(i, j) = Complex(n(rng), n(rng));
    p.add_equality(LinearFunctional().add(s_blk, CMatrix((g + g.adjoint()) / 2)), n(rng));
  }
  p.add_equality(LinearFunctional().add(s_blk, CMatrix::Identity(3, 3)), 1.0);
  p.set_objective(LinearFunctional().add(s_blk, CMatrix::Identity(3, 3)));
  const SdpSolution a = feasibility(p), b = feasibility(p);
  EXPECT_EQ(a.status, b.status);
  EXPECT_EQ(a.phase_one_slack, b.phase_one_slack);
  EXPECT_EQ(a.objective, b.objective);
  const SdpSolution c = solve(p), d = solve(p);
  EXPECT_EQ(c.status, d.status);
  EXPECT_EQ(c.objective, d.objective);
}

TEST(Sdp, PhaseOneAgreesWithPhaseTwo) {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> n;
  int feasible = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 2 + trial % 3;
    SdpProblem p;
    auto blk = p.add_psd_block(dim);
    auto x = p.add_nonneg_block(2);
    for (int k = 0; k < 3; ++k) {
      CMatrix g(dim, dim);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = Complex(n(rng), n(rng));
      p.add_equality(
          LinearFunctional().add(blk, CMatrix((g + g.adjoint()) / 2)).add(x, k % 2, n(rng)),
          n(rng));
    }
    p.add_equality(LinearFunctional().add(blk, CMatrix::Identity(dim, dim)).add(x, 0, 1).add(x, 1, 1),
                   1.0);
    const SdpSolution f = feasibility(p);
    if (f.status == Status::FeasiblePoint) {
      ++feasible;
      EXPECT_LE(f.primal_residual, 1e-7);
      EXPECT_GE(min_eigenvalue(f.primal[blk].psd), -1e-8);
      const SdpSolution s = solve(p);  // zero objective
      EXPECT_EQ(s.status, Status::Optimal) << "trial " << trial << ": " << s.message;
    } else if (f.status == Status::Infeasible) {
      const DualRay r = extract_dual_ray(f);
      EXPECT_GE(r.margin, 1e-9);
      EXPECT_LE(r.cone_violation, 1e-8);
      EXPECT_NE(solve(p).status, Status::Optimal);
    }
  }
  EXPECT_GT(feasible, 0);
}
