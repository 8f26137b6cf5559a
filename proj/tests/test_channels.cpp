#include <gtest/gtest.h>

#include <cmath>

#include "magic/appendix_data.hpp"
#include "magic/bloch.hpp"
#include "magic/channels.hpp"
#include "magic/random.hpp"

using namespace magic;

namespace {

CMatrix hadamard() {
  CMatrix h(2, 2);
  h << 1, 1, 1, -1;
  return h / std::sqrt(2.0);
}

CMatrix t_gate() {
  CMatrix t = CMatrix::Identity(2, 2);
  t(1, 1) = std::polar(1.0, M_PI / 4);
  return t;
}

}  // namespace

TEST(Choi, IdentityChannel) {
  for (int d : {2, 3, 5}) {
    const ChoiMatrix j = choi_identity(d);
    EXPECT_EQ(j.dim_out(), d);
    EXPECT_NEAR(j.matrix().trace().real(), double(d), 1e-12);
    EXPECT_LT(tp_residual(j.matrix(), d, d), 1e-14);
    random::Rng rng(d);
    const DensityMatrix rho = random::mixed_state(d, rng);
    EXPECT_LT(max_abs(apply_channel(j, rho).matrix() - rho.matrix()), 1e-12);
    EXPECT_TRUE(verify_spo(j).clean());
  }
}

TEST(Choi, TransposeConvention) {
  // tr(J (X (x) Y^T)) = tr(X E(Y)).
  random::Rng rng(3);
  const ChoiMatrix j = random::measure_prepare_channel(3, 2, rng);
  for (int k = 0; k < 10; ++k) {
    const CMatrix x = random::hermitian(2, rng).matrix();
    const CMatrix y = random::ginibre(3, 3, rng);
    const Complex lhs = (j.matrix() * kron(x, CMatrix(y.transpose()))).trace();
    const Complex rhs = (x * apply_choi(j.matrix(), 2, 3, y)).trace();
    EXPECT_LT(std::abs(lhs - rhs), 1e-12);
  }
}

TEST(Choi, RejectsInvalid) {
  CMatrix j = choi_identity(2).matrix();
  EXPECT_THROW(ChoiMatrix(2, 2, CMatrix(0.5 * j)), InvariantViolation);
  CMatrix neg = j;
  neg(0, 0) -= 0.3;
  neg(3, 3) += 0.3;
  EXPECT_THROW(ChoiMatrix(2, 2, neg), InvariantViolation);
  EXPECT_THROW(ChoiMatrix(2, 3, j), DimensionMismatch);
  EXPECT_THROW(ChoiMatrix(2, 2, CMatrix::Identity(3, 3)), DimensionMismatch);
  EXPECT_THROW(ChoiMatrix(4, 1, CMatrix::Identity(4, 4)), InvariantViolation);
}

TEST(Choi, UnitaryChannels) {
  const ChoiMatrix h = choi_unitary(hadamard());
  EXPECT_TRUE(verify_spo(h).clean());
  const ChoiMatrix s = choi_unitary(shift_operator(3));
  EXPECT_TRUE(verify_spo(s).clean());
  const ChoiMatrix t = choi_unitary(t_gate());
  const SpoReport r = verify_spo(t);
  EXPECT_TRUE(r.cp_ok);
  EXPECT_TRUE(r.tp_ok);
  ASSERT_FALSE(r.sp_violations.empty());
  // T|+> has Bloch vector (1,1,0)/sqrt2, outside the octahedron by 1/sqrt2 - 1/2.
  EXPECT_NEAR(r.worst_value, 0.5 - 1.0 / std::sqrt(2.0), 1e-12);
  for (const auto& v : r.sp_violations) EXPECT_LT(v.value, -tol::spo_inequality);
}

TEST(Choi, QutritNonCliffordDiagonal) {
  CMatrix u = CMatrix::Identity(3, 3);
  u(1, 1) = std::polar(1.0, 2 * M_PI / 9);
  u(2, 2) = std::polar(1.0, -2 * M_PI / 9);
  EXPECT_FALSE(verify_spo(choi_unitary(u)).clean());
}

TEST(Choi, MeasurePrepareExamples) {
  // Measure Z, prepare |0> or |+>.
  const MubSet& m = mub_set(2);
  const ChoiMatrix j = choi_measure_prepare({m.projector(0, 0), m.projector(0, 1)},
                                            {DensityMatrix(m.projector(0, 0)),
                                             DensityMatrix(m.projector(1, 0))});
  EXPECT_TRUE(verify_spo(j).clean());
  const DensityMatrix out = apply_channel(j, states::t_state());
  const double p0 = states::t_state().matrix()(0, 0).real();
  EXPECT_LT(max_abs(out.matrix() - (p0 * m.projector(0, 0) + (1 - p0) * m.projector(1, 0))),
            1e-12);

  EXPECT_THROW(choi_measure_prepare({m.projector(0, 0)}, {states::basis_state(2, 0)}),
               InvariantViolation);
  EXPECT_THROW(choi_measure_prepare({m.projector(0, 0), m.projector(0, 1)},
                                    {states::basis_state(2, 0), states::t_state()}),
               InvariantViolation);
  EXPECT_THROW(choi_measure_prepare({}, {}), InvariantViolation);
}

TEST(Choi, RandomMeasurePrepareAreClean) {
  random::Rng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const int din = trial % 2 ? 2 : 3, dout = trial % 3 ? 3 : 2;
    const ChoiMatrix j = random::measure_prepare_channel(din, dout, rng);
    const SpoReport r = verify_spo(j, {1e-10, 1e-10, 1e-10});
    EXPECT_TRUE(r.clean()) << "trial " << trial << " worst " << r.worst_value;
    EXPECT_TRUE(r.exhaustive);
  }
}

TEST(Choi, ImagesOfStabilizerStatesAreStabilizer) {
  random::Rng rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const int din = 2 + trial % 2, dout = 3 - trial % 2;
    const ChoiMatrix j = random::measure_prepare_channel(din, dout, rng);
    const MubSet& m = mub_set(din);
    for (int a = 0; a <= din; ++a)
      for (int u = 0; u < din; ++u) {
        const DensityMatrix img = apply_channel(j, DensityMatrix(m.projector(a, u)));
        EXPECT_TRUE(is_stabilizer(img, 1e-10).stabilizer);
      }
  }
}

TEST(Choi, CliffordRelabelingKeepsSpo) {
  // Conjugating a stabilizer-preserving map by Clifford unitaries on either
  // side keeps it stabilizer preserving.
  random::Rng rng(13);
  const CMatrix s = shift_operator(3), p = phase_operator(3);
  for (int trial = 0; trial < 10; ++trial) {
    const ChoiMatrix j = random::measure_prepare_channel(3, 3, rng);
    const CMatrix before = trial % 2 ? s : p;
    const CMatrix after = trial % 2 ? CMatrix(p * s) : CMatrix(s.adjoint());
    const CMatrix jr = choi_of_map(3, 3, [&](const CMatrix& x) {
      return CMatrix(after * apply_choi(j.matrix(), 3, 3, before * x * before.adjoint()) *
                     after.adjoint());
    });
    const SpoReport a = verify_spo(j), b = verify_spo(jr, 3, 3);
    EXPECT_TRUE(b.clean());
    EXPECT_NEAR(a.worst_value, b.worst_value, 1e-10);
  }
}

TEST(Choi, PrintedAppendixChoi) {
  const double pt = tol::printed_matrix;
  const CMatrix j = appendix::choi();
  const SpoReport r = verify_spo(j, 3, 3, {pt, pt, pt});
  EXPECT_TRUE(r.clean()) << "min eig " << r.min_eigenvalue << " tp " << r.tp_residual
                         << " worst " << r.worst_value;
  EXPECT_LE(max_abs(apply_choi(j, 3, 3, appendix::rho().matrix()) - appendix::rho_prime().matrix()),
            pt);
}

TEST(Choi, ApplyChannelRejectsDimensionMismatch) {
  EXPECT_THROW(apply_channel(choi_identity(3), states::basis_state(2, 0)), DimensionMismatch);
}
