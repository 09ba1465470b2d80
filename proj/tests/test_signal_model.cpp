#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "satreg/pde_models.hpp"
#include "satreg/signal_model.hpp"

using namespace satreg;
using std::numbers::pi;

namespace {

CVec cv(std::initializer_list<double> xs) {
  CVec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

SignalSpec scalar_sine(double omega) {
  SignalSpec s = SignalSpec::zeros(1, 1, {omega});
  s.harmonics[0].b = cv({1});
  return s;
}

}  // namespace

TEST(Signals, HeatReferenceAtZero) {
  const CVec y = eval_reference(heat_paper_signals(), 0.0);
  EXPECT_NEAR(y(0).real(), 1.0, 1e-15);
  EXPECT_NEAR(y(1).real(), 3.5, 1e-15);
}

TEST(Signals, HeatDisturbanceAtZero) { EXPECT_NEAR(eval_disturbance(heat_paper_signals(), 0.0)(0).real(), 5.0, 1e-15); }

TEST(Signals, WaveDisturbanceAtTenth) {
  EXPECT_NEAR(eval_disturbance(wave_paper_signals(), 0.1)(0).real(), 0.0, 1e-15);
}

TEST(Signals, ZeroSignals) {
  const SignalSpec s = SignalSpec::zeros(2, 1, {1.0, 2.0});
  EXPECT_EQ(eval_reference(s, 0.7).norm(), 0.0);
  EXPECT_EQ(eval_disturbance(s, 0.7).norm(), 0.0);
}

TEST(Signals, SineAtHalf) { EXPECT_NEAR(eval_reference(scalar_sine(pi), 0.5)(0).real(), 1.0, 1e-15); }

TEST(Signals, NegativeTimeRejected) {
  EXPECT_THROW(eval_reference(scalar_sine(pi), -1.0), InvalidArgument);
}

TEST(Signals, ValidateRejectsBadFrequencies) {
  EXPECT_THROW(SignalSpec::zeros(1, 1, {1.0, 1.0}).validate(), InvalidArgument);
  EXPECT_THROW(SignalSpec::zeros(1, 1, {0.0}).validate(), InvalidArgument);
  EXPECT_THROW(SignalSpec::zeros(1, 1, {-2.0}).validate(), InvalidArgument);
  SignalSpec s = SignalSpec::zeros(2, 1, {1.0});
  s.harmonics[0].a = cv({1});
  EXPECT_THROW(s.validate(), DimensionMismatch);
}

TEST(Exosystem, SingleFrequencyMatrix) {
  SignalSpec s = scalar_sine(pi);
  s.a0 = cv({1});
  const Exosystem exo = build_exosystem(s);
  Mat expected = Mat::Zero(3, 3);
  expected(1, 2) = pi;
  expected(2, 1) = -pi;
  EXPECT_EQ(exo.A_exo, expected);
  EXPECT_EQ(exo.v0, Vec((Vec(3) << 1, 1, 0).finished()));
}

TEST(Exosystem, NoHarmonics) {
  SignalSpec s = SignalSpec::zeros(1, 1);
  s.a0 = cv({2});
  const Exosystem exo = build_exosystem(s);
  EXPECT_EQ(exo.dim(), 1);
  EXPECT_EQ(exo.A_exo(0, 0), 0.0);
  EXPECT_EQ(exo.v0(0), 1.0);
}

TEST(Exosystem, ConstantBlockDroppedWithoutMean) {
  const Exosystem exo = build_exosystem(scalar_sine(2.0));
  EXPECT_FALSE(exo.has_constant_block);
  EXPECT_EQ(exo.dim(), 2);
  EXPECT_EQ(exo.block_offset(0), 0);
}

TEST(Exosystem, StateExamples) {
  SignalSpec s = scalar_sine(pi);
  s.a0 = cv({1});
  const Exosystem exo = build_exosystem(s);
  EXPECT_EQ(exo_state(exo, 0.0), exo.v0);
  const Vec v = exo_state(exo, 0.5);
  EXPECT_NEAR(v(0), 1.0, 1e-15);
  EXPECT_NEAR(v(1), 0.0, 1e-15);
  EXPECT_NEAR(v(2), -1.0, 1e-15);
}

// F v(t) and E v(t) reproduce the signals; |v(t)| is constant; A_exo is skew.
TEST(Exosystem, ConsistentWithSignals) {
  for (const SignalSpec& s : {heat_paper_signals(), wave_paper_signals()}) {
    const Exosystem exo = build_exosystem(s);
    EXPECT_EQ((exo.A_exo + exo.A_exo.transpose()).norm(), 0.0);
    for (int i = 0; i <= 50; ++i) {
      const double t = 0.137 * i;
      const Vec v = exo_state(exo, t);
      EXPECT_NEAR((exo.F * v.cast<cplx>() - eval_reference(s, t)).norm(), 0.0, 1e-13);
      EXPECT_NEAR((exo.E * v.cast<cplx>() - eval_disturbance(s, t)).norm(), 0.0, 1e-13);
      EXPECT_NEAR(v.norm(), exo.v0.norm(), 1e-13);
    }
  }
}

// exo_state agrees with a matrix exponential of A_exo.
TEST(Exosystem, StateMatchesFlow) {
  const Exosystem exo = build_exosystem(heat_paper_signals());
  const double t = 0.3;
  // Taylor series; A_exo t has norm 5 pi * 0.3 < 5
  Mat term = Mat::Identity(exo.dim(), exo.dim()), sum = term;
  for (int k = 1; k < 60; ++k) {
    term = term * exo.A_exo * t / k;
    sum += term;
  }
  EXPECT_NEAR((sum * exo.v0 - exo_state(exo, t)).norm(), 0.0, 1e-12);
}

TEST(Signals, ScaledAndFrequencies) {
  const SignalSpec s = heat_paper_signals();
  const SignalSpec h = s.scaled(0.5);
  EXPECT_NEAR((eval_reference(h, 0.3) - 0.5 * eval_reference(s, 0.3)).norm(), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(s.min_omega(), pi);
  EXPECT_DOUBLE_EQ(s.max_omega(), 5 * pi);
  EXPECT_TRUE(s.is_real());
  EXPECT_TRUE(s.has_constant_part());
  EXPECT_FALSE(wave_paper_signals().has_constant_part());
}
