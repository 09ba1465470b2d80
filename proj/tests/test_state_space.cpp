#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "satreg/pde_models.hpp"
#include "satreg/state_space.hpp"

using namespace satreg;
using std::numbers::pi;

namespace {

const cplx I(0.0, 1.0);

StateSpaceModel diag_model() {
  Mat A = Mat::Zero(2, 2);
  A(0, 0) = -1;
  A(1, 1) = -2;
  return StateSpaceModel(A, Mat::Ones(2, 1), Mat::Zero(2, 0), Mat::Ones(1, 2));
}

// Dense oracle: C (lambda - A)^{-1} B via a full pivoting LU.
CMat oracle_transfer(const Mat& A, const Mat& B, const Mat& C, cplx lambda) {
  const CMat K = lambda * CMat::Identity(A.rows(), A.cols()) - A.cast<cplx>();
  return C.cast<cplx>() * K.fullPivLu().solve(B.cast<cplx>());
}

}  // namespace

TEST(StateSpace, ToyTransfer) {
  const auto toy = build_toy(-1.0);
  EXPECT_NEAR(std::abs(transfer(toy, 0.0).Pc(0, 0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(transfer(toy, I).Pc(0, 0) - (1.0 - I) / 2.0), 0.0, 1e-15);
}

TEST(StateSpace, DiagonalTransfer) { EXPECT_NEAR(transfer(diag_model(), 0.0).Pc(0, 0).real(), 1.5, 1e-15); }

TEST(StateSpace, ClosedLoopToy) {
  const auto toy = build_toy(-1.0);
  EXPECT_NEAR(std::abs(closed_loop_transfer(toy, 1.0, 0.0).Pc(0, 0) - 0.5), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(closed_loop_transfer(toy, 1.0, 0.0, ClosedLoopPath::FeedbackIdentity).Pc(0, 0) - 0.5), 0.0,
              1e-15);
  const TransferValue a = closed_loop_transfer(toy, 0.0, 2.0 * I);
  const TransferValue b = transfer(toy, 2.0 * I);
  EXPECT_EQ(a.Pc, b.Pc);
  EXPECT_EQ(a.Pd, b.Pd);
}

TEST(StateSpace, ClosedLoopGenerator) {
  const auto toy = build_toy(-1.0);
  EXPECT_EQ(closed_loop_generator(toy, 1.0)(0, 0), -2.0);
  EXPECT_EQ(closed_loop_generator(toy, 0.0)(0, 0), -1.0);
}

TEST(StateSpace, SingularResolventRejected) {
  const auto toy = build_toy(-1.0);
  EXPECT_THROW(transfer(toy, -1.0), NearSingularResolvent);
  const Mat A = Mat::Zero(1, 1);
  const StateSpaceModel integrator(A, Mat::Ones(1, 1), Mat::Zero(1, 0), Mat::Ones(1, 1));
  EXPECT_THROW(transfer(integrator, 0.0), NearSingularResolvent);
  EXPECT_NO_THROW(closed_loop_transfer(integrator, 1.0, 0.0));
}

TEST(StateSpace, DimensionChecks) {
  EXPECT_THROW(StateSpaceModel(Mat::Zero(2, 2), Mat::Zero(3, 1), Mat::Zero(2, 0), Mat::Zero(1, 2)),
               DimensionMismatch);
  EXPECT_THROW(StateSpaceModel(Mat::Zero(2, 3), Mat::Zero(2, 1), Mat::Zero(2, 0), Mat::Zero(1, 2)),
               DimensionMismatch);
  Mat M = Mat::Identity(2, 2);
  M(0, 0) = -1;
  EXPECT_THROW(StateSpaceModel(Mat::Zero(2, 2), Mat::Zero(2, 1), Mat::Zero(2, 0), Mat::Zero(1, 2), M),
               InvalidArgument);
}

TEST(StateSpace, Passivity) {
  EXPECT_TRUE(check_passivity(build_toy(-1.0)).passive);
  const StateSpaceModel unstable(Mat::Ones(1, 1), Mat::Ones(1, 1), Mat::Zero(1, 0), Mat::Ones(1, 1));
  const auto rep = check_passivity(unstable);
  EXPECT_FALSE(rep.passive);
  EXPECT_GT(rep.worst_eigenvalue, 1e-10);
  // B_c and C mismatched: not passive even for stable A
  const StateSpaceModel skew(-Mat::Identity(1, 1), Mat::Ones(1, 1), Mat::Zero(1, 0), -Mat::Ones(1, 1));
  EXPECT_FALSE(check_passivity(skew).passive);
}

TEST(StateSpace, SpectralAbscissa) {
  EXPECT_DOUBLE_EQ(spectral_abscissa(Mat::Constant(1, 1, -2.0)), -2.0);
  Mat R(2, 2);
  R << 0, 1, -1, 0;
  EXPECT_NEAR(spectral_abscissa(R), 0.0, 1e-15);
}

// Random dense model against the oracle and against the feedback identity.
TEST(StateSpace, RandomModelMatchesOracle) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  const int ns = 9, nu = 2, nd = 1;
  Mat A(ns, ns), Bc(ns, nu), Bd(ns, nd);
  for (auto* m : {&A, &Bc, &Bd})
    for (Eigen::Index i = 0; i < m->size(); ++i) m->data()[i] = n(rng);
  A -= 6.0 * Mat::Identity(ns, ns);
  const Mat C = Bc.transpose();
  const StateSpaceModel model(A, Bc, Bd, C);
  for (cplx lambda : {cplx(0.3, 0), cplx(0, 1.7), cplx(-0.5, 4.0)}) {
    const TransferValue tv = transfer(model, lambda);
    EXPECT_LE((tv.Pc - oracle_transfer(A, Bc, C, lambda)).norm(), 1e-12);
    EXPECT_LE((tv.Pd - oracle_transfer(A, Bd, C, lambda)).norm(), 1e-12);
    for (double kappa : {0.5, 2.0}) {
      const TransferValue g = closed_loop_transfer(model, kappa, lambda);
      const TransferValue f = closed_loop_transfer(model, kappa, lambda, ClosedLoopPath::FeedbackIdentity);
      EXPECT_LE((g.Pc - f.Pc).norm(), 1e-8 * g.Pc.norm());
      EXPECT_LE((g.Pd - f.Pd).norm(), 1e-8 * (1.0 + g.Pd.norm()));
    }
  }
}

TEST(StateSpace, SigmaMinLargeModelEstimate) {
  // Above 400 states an estimate is used; it must be within a modest factor.
  const int n = 450;
  Mat A = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) A(i, i) = -1.0 - i;
  const double s = resolvent_sigma_min(A, cplx(0, 0.0));
  EXPECT_GT(s, 0.1);
  EXPECT_LT(s, 10.0);
  EXPECT_NEAR(resolvent_threshold(Mat::Zero(3, 3)), 1e-10, 1e-25);
}

TEST(StateSpace, HeatZeroFrequency) {
  const auto heat = build_heat2d({8});
  EXPECT_THROW(transfer(heat, 0.0), NearSingularResolvent);
  EXPECT_NO_THROW(closed_loop_transfer(heat, 3.0, 0.0));
}

TEST(StateSpace, HeatConjugateSymmetry) {
  const auto heat = build_heat2d({15});
  for (double w : {pi, 3 * pi, 5 * pi}) {
    const auto p = closed_loop_transfer(heat, 3.0, cplx(0, w));
    const auto m = closed_loop_transfer(heat, 3.0, cplx(0, -w));
    EXPECT_LE((p.Pc.conjugate() - m.Pc).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((p.Pd.conjugate() - m.Pd).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(StateSpace, PdeModelsPassiveAndStableUnderFeedback) {
  const auto heat = build_heat2d({15});
  const auto wave = build_wave1d({20});
  EXPECT_TRUE(check_passivity(heat).passive);
  EXPECT_TRUE(check_passivity(wave).passive);
  EXPECT_LT(spectral_abscissa(closed_loop_generator(heat, 3.0)), 0.0);
  EXPECT_LT(spectral_abscissa(closed_loop_generator(wave, 0.75)), 0.0);
}
