#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

#include "magic/appendix_data.hpp"
#include "magic/bloch.hpp"
#include "magic/conversion.hpp"
#include "magic/random.hpp"

using namespace magic;

TEST(ConversionSdp, RowCounts) {
  const ConversionSdp q = build_conversion_sdp(states::t_state(), states::h_state());
  EXPECT_EQ(q.tp_rows, 4u);
  EXPECT_EQ(q.conv_rows, 3u);
  EXPECT_EQ(q.ineq_rows, 48u);  // 8 phase points x 3 bases x 2 vectors
  EXPECT_EQ(q.problem.equalities().size(), 55u);
  const ConversionSdp t = build_conversion_sdp(appendix::rho(), appendix::rho_prime());
  EXPECT_EQ(t.ineq_rows, 972u);  // 81 x 4 x 3
  EXPECT_EQ(t.problem.blocks()[t.j_block].dim, 9);
  EXPECT_EQ(t.problem.blocks()[t.slack_block].dim, 972);
  const ConversionSdp m = build_conversion_sdp(states::t_state(), appendix::rho());
  EXPECT_EQ(m.ineq_rows, 81u * 3 * 2);  // qutrit output, qubit input
}

TEST(ConversionSdp, IdentityChoiSatisfiesRows) {
  for (int d : {2, 3}) {
    random::Rng rng(d);
    const DensityMatrix rho = random::mixed_state(d, rng);
    const ConversionSdp c = build_conversion_sdp(rho, rho);
    const CMatrix j = choi_identity(d).matrix();
    sdp::BlockValues x(2);
    x[c.j_block].psd = j;
    RVector s(c.ineq_rows);
    const auto& eqs = c.problem.equalities();
    for (std::size_t i = 0; i < c.ineq_rows; ++i)
      s(Eigen::Index(i)) = hs_inner(eqs[c.tp_rows + c.conv_rows + i].lhs.psd.front().coeff, j);
    EXPECT_GE(s.minCoeff(), -1e-12);
    x[c.slack_block].scalars = s;
    EXPECT_LT(c.problem.primal_residual(x), 1e-12);
  }
}

TEST(Conversion, SelfConversionIsFeasible) {
  random::Rng rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    const DensityMatrix rho =
        trial % 4 == 0 ? random::pure_state(2, rng) : random::mixed_state(2, rng);
    const ConversionResult r = check_conversion(rho, rho);
    ASSERT_EQ(r.verdict, Verdict::Feasible) << "trial " << trial << ": " << r.message;
    ASSERT_TRUE(r.choi.has_value());
    EXPECT_LE(r.map_error, tol::conversion_map);
    EXPECT_TRUE(r.spo->clean());
  }
  for (int trial = 0; trial < 3; ++trial) {
    const DensityMatrix rho = random::mixed_state(3, rng);
    EXPECT_EQ(check_conversion(rho, rho).verdict, Verdict::Feasible);
  }
}

TEST(Conversion, MagicToStabilizerIsFeasible) {
  const MubSet& m = mub_set(2);
  for (int b = 0; b < 3; ++b)
    for (int v = 0; v < 2; ++v) {
      const ConversionResult r = check_conversion(states::t_state(), DensityMatrix(m.projector(b, v)));
      EXPECT_EQ(r.verdict, Verdict::Feasible) << r.message;
    }
  EXPECT_EQ(check_conversion(states::h_state(), DensityMatrix::maximally_mixed(2)).verdict,
            Verdict::Feasible);
  EXPECT_EQ(check_conversion(states::t_state(), states::t_state()).verdict, Verdict::Feasible);
}

TEST(Conversion, StabilizerToMagicIsInfeasible) {
  const ConversionResult r = check_conversion(states::basis_state(2, 0), states::t_state());
  ASSERT_EQ(r.verdict, Verdict::Infeasible) << r.message;
  ASSERT_TRUE(r.witness.has_value());
  ASSERT_TRUE(r.witness_check.has_value());
  EXPECT_FALSE(r.witness_check->holds);
  EXPECT_GE(r.witness_check->margin, tol::witness_margin);
  EXPECT_GE(r.witness_check->margin, r.witness->predicted_margin - 1e-8);
  EXPECT_FALSE(r.choi.has_value());
  EXPECT_EQ(check_conversion(DensityMatrix::maximally_mixed(2), states::h_state()).verdict,
            Verdict::Infeasible);
}

TEST(Conversion, WitnessIsScaleInvariant) {
  const DensityMatrix rho = states::basis_state(2, 0), rhop = states::t_state();
  const ConversionSdp c = build_conversion_sdp(rho, rhop);
  const sdp::SdpSolution s = sdp::feasibility(c.problem);
  ASSERT_EQ(s.status, sdp::Status::Infeasible);
  const RVector y = sdp::extract_dual_ray(s).multipliers;
  const Witness a = witness_from_dual(c, y, rho, rhop);
  const Witness b = witness_from_dual(c, 10.0 * y, rho, rhop);
  EXPECT_LT(max_abs(a.sigma.matrix() - b.sigma.matrix()), 1e-12);
  EXPECT_NEAR(a.t, b.t, 1e-12 * (1 + a.t));
  ASSERT_EQ(a.p.size(), b.p.size());
  for (std::size_t i = 0; i < a.p.size(); ++i) EXPECT_NEAR(a.p[i], b.p[i], 1e-12);
  EXPECT_NEAR(a.predicted_margin, b.predicted_margin, 1e-12);
  EXPECT_GT(a.predicted_margin, 0.0);
  EXPECT_THROW(witness_from_dual(c, RVector::Zero(3), rho, rhop), DimensionMismatch);
  EXPECT_THROW(witness_from_dual(c, -y, rho, rhop), NumericalFailure);
}

TEST(Conversion, WitnessRegroupsTheRay) {
  // The Farkas certificate, evaluated at (sigma, t, p), equals the criterion
  // gap: lhs - q >= N_t * eps * (tr X + tr(Y rho')).
  random::Rng rng(7);
  int infeasible = 0;
  for (int trial = 0; trial < 30 && infeasible < 8; ++trial) {
    const DensityMatrix rho = random::mixed_state(2, rng);
    const DensityMatrix rhop = random::pure_state(2, rng);
    const ConversionSdp c = build_conversion_sdp(rho, rhop);
    const sdp::SdpSolution s = sdp::feasibility(c.problem);
    if (s.status != sdp::Status::Infeasible) continue;
    ++infeasible;
    const Witness w = witness_from_dual(c, sdp::extract_dual_ray(s).multipliers, rho, rhop);
    const Lemma2Check chk = lemma2_check(rho, rhop, w.params());
    EXPECT_GE(chk.margin, w.predicted_margin - 1e-7) << "trial " << trial;
    EXPECT_FALSE(chk.holds);
  }
  EXPECT_GT(infeasible, 0);
}

TEST(Conversion, AppendixPairIsFeasible) {
  const auto t0 = std::chrono::steady_clock::now();
  const ConversionResult r = check_conversion(appendix::rho(), appendix::rho_prime());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  ASSERT_EQ(r.verdict, Verdict::Feasible) << r.message;
  EXPECT_LE(r.map_error, 1e-6);
  EXPECT_TRUE(verify_spo(*r.choi).clean());
  EXPECT_LE(r.phase_one_slack, 1e-8);
  EXPECT_LT(secs, 60.0);
}

TEST(Conversion, FeasibleResultsReproduceTarget) {
  const MubSet& m = mub_set(2);
  const ConversionResult r = check_conversion(states::t_state(), DensityMatrix(m.projector(1, 0)));
  ASSERT_EQ(r.verdict, Verdict::Feasible);
  EXPECT_LT(max_abs(apply_channel(*r.choi, states::t_state()).matrix() - m.projector(1, 0)), 1e-6);
}

TEST(Corollary, FeasibleAndInfeasibleCases) {
  std::vector<CorollarySample> samples;
  for (double t : {0.0, 0.5, 1.0, 2.0}) samples.push_back({states::basis_state(2, 0), t});
  samples.push_back({states::t_state(), 1.0});

  const CorollaryReport f = corollary_check(states::t_state(), states::basis_state(2, 1), samples);
  EXPECT_EQ(f.verdict, Verdict::Feasible);
  EXPECT_TRUE(f.consistent) << f.message;
  for (const auto& row : f.rows) EXPECT_TRUE(row.ordered) << "t " << row.t;

  const CorollaryReport i = corollary_check(states::basis_state(2, 0), states::t_state(), samples);
  EXPECT_EQ(i.verdict, Verdict::Infeasible);
  EXPECT_TRUE(i.witness_violates_ordering);
  EXPECT_TRUE(i.consistent) << i.message;
}

TEST(Conversion, RejectsUnsupportedDimensions) {
  EXPECT_THROW(build_conversion_sdp(DensityMatrix::maximally_mixed(4), DensityMatrix::maximally_mixed(2)),
               InvariantViolation);
}
