#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "satreg/pde_models.hpp"
#include "satreg/regulator.hpp"

using namespace satreg;
using std::numbers::pi;

namespace {

const cplx I(0.0, 1.0);

CVec cv(std::initializer_list<cplx> xs) {
  CVec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (cplx x : xs) v(i++) = x;
  return v;
}

SignalSpec toy_sine() {
  SignalSpec s = SignalSpec::zeros(1, 1, {1.0});
  s.harmonics[0].b = cv({1.0});
  return s;
}

RegulatorCoefficients scalar_coeffs(double omega, cplx f, cplx g) {
  RegulatorCoefficients c;
  c.f0 = CVec::Zero(1);
  c.omegas = {omega};
  c.f = {cv({f})};
  c.g = {cv({g})};
  return c;
}

struct Case {
  const char* name;
  StateSpaceModel model;
  double kappa;
  SignalSpec signals;
};

std::vector<Case> paper_cases() {
  SignalSpec toy = SignalSpec::zeros(1, 1, {1.0, 2.5});
  toy.a0 = cv({0.5});
  toy.c0 = cv({-1.0});
  toy.harmonics[0].a = cv({1.0});
  toy.harmonics[0].d = cv({0.3});
  toy.harmonics[1].b = cv({-2.0});
  toy.harmonics[1].c = cv({0.7});
  return {{"toy", build_toy(-1.0), 1.0, toy},
          {"heat15", build_heat2d({15}), 3.0, heat_paper_signals()},
          {"wave20", build_wave1d({20}), 0.75, wave_paper_signals()}};
}

}  // namespace

TEST(Regulator, ToySineCoefficients) {
  const auto c = compute_coefficients(build_toy(-1.0), 0.0, toy_sine());
  ASSERT_EQ(c.f.size(), 1u);
  EXPECT_NEAR(std::abs(c.f[0](0) - (1.0 - I)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(c.g[0](0) - (1.0 + I)), 0.0, 1e-15);
  EXPECT_EQ(c.f0.norm(), 0.0);
  // u_reg = cos t + sin t
  for (double t : {0.0, 0.4, 2.0, 7.3}) EXPECT_NEAR(eval_ureg(c, t)(0), std::cos(t) + std::sin(t), 1e-14);
}

// Steady-state oracle: x' = -x + cos t + sin t has periodic solution x = sin t.
TEST(Regulator, ToySineSteadyStateOracle) {
  const auto c = compute_coefficients(build_toy(-1.0), 0.0, toy_sine());
  double x = 0.0;  // x(0) = sin 0, on the periodic orbit
  const double h = 1e-4;
  for (int i = 0; i < 50000; ++i) {
    const double t = i * h;
    auto f = [&](double tt, double xx) { return -xx + eval_ureg(c, tt)(0); };
    const double k1 = f(t, x), k2 = f(t + h / 2, x + h / 2 * k1), k3 = f(t + h / 2, x + h / 2 * k2),
                 k4 = f(t + h, x + h * k3);
    x += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  EXPECT_NEAR(x, std::sin(5.0), 1e-10);
}

TEST(Regulator, ZeroSignalsGiveZeroCoefficients) {
  const auto c = compute_coefficients(build_heat2d({6}), 3.0, SignalSpec::zeros(2, 1, {pi, 2 * pi}));
  EXPECT_EQ(c.f0.norm(), 0.0);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(c.f[k].norm(), 0.0);
    EXPECT_EQ(c.g[k].norm(), 0.0);
  }
}

TEST(Regulator, ConstantDisturbanceUnderFeedback) {
  // toy, kappa = 1: P_c^k(0) = P_d^k(0) = 1/2, so f0 = -c0
  SignalSpec s = SignalSpec::zeros(1, 1);
  s.c0 = cv({2.0});
  const auto c = compute_coefficients(build_toy(-1.0), 1.0, s);
  EXPECT_NEAR(std::abs(c.f0(0) + 2.0), 0.0, 1e-15);
}

TEST(Regulator, EvalUregExamples) {
  EXPECT_EQ(eval_ureg(scalar_coeffs(1.0, 0.0, 0.0), 3.0)(0), 0.0);
  EXPECT_NEAR(eval_ureg(scalar_coeffs(1.0, 1.0 - I, 1.0 + I), pi / 2)(0), 1.0, 1e-15);
  EXPECT_NEAR(eval_ureg(scalar_coeffs(1.0, 1.0 - I, 1.0 + I), 0.0)(0), 1.0, 1e-15);
}

TEST(Regulator, ToyConstantReferenceSolution) {
  SignalSpec s = SignalSpec::zeros(1, 1);
  s.a0 = cv({1.0});
  const auto sol = solve_regulator_equations(build_toy(-1.0), 0.0, build_exosystem(s));
  EXPECT_NEAR(std::abs(sol.Gamma(0, 0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(sol.Pi(0, 0) - 1.0), 0.0, 1e-15);
}

TEST(Regulator, EmptyExosystem) {
  const auto exo = build_exosystem(SignalSpec::zeros(1, 1));
  const auto sol = solve_regulator_equations(build_toy(-1.0), 0.0, exo);
  EXPECT_EQ(sol.Pi.norm(), 0.0);
  EXPECT_EQ(sol.Gamma.norm(), 0.0);
  const auto [r1, r2] = regulator_residual(build_toy(-1.0), 0.0, exo, sol);
  EXPECT_EQ(r1, 0.0);
  EXPECT_EQ(r2, 0.0);
}

class PaperModels : public ::testing::TestWithParam<int> {};

TEST_P(PaperModels, GammaReproducesUreg) {
  const Case c = paper_cases()[GetParam()];
  const auto exo = build_exosystem(c.signals);
  const auto coeffs = compute_coefficients(c.model, c.kappa, c.signals);
  const auto sol = solve_regulator_equations(c.model, c.kappa, exo);
  const double span = 2 * pi / c.signals.min_omega();
  for (int i = 0; i < 100; ++i) {
    const double t = span * i / 100.0;
    const CVec gv = sol.Gamma * exo_state(exo, t).cast<cplx>();
    EXPECT_LE((gv - eval_ureg_complex(coeffs, t)).norm(), 1e-8) << c.name << " t=" << t;
    EXPECT_LE(eval_ureg_complex(coeffs, t).imag().norm(), 1e-10) << c.name;
  }
  EXPECT_LE((feedforward_gain(coeffs, exo) - sol.Gamma).norm(), 1e-8 * (1 + sol.Gamma.norm()));
}

TEST_P(PaperModels, ResidualsSmall) {
  const Case c = paper_cases()[GetParam()];
  const auto exo = build_exosystem(c.signals);
  const auto sol = solve_regulator_equations(c.model, c.kappa, exo);
  const auto [r1, r2] = regulator_residual(c.model, c.kappa, exo, sol);
  const double tol = 1e-8 * (1 + sol.Pi.norm());
  EXPECT_LE(r1, tol) << c.name;
  EXPECT_LE(r2, tol) << c.name;
  // real solution in real coordinates
  EXPECT_LE(sol.Pi.imag().norm(), 1e-10 * (1 + sol.Pi.norm()));
  EXPECT_LE(sol.Gamma.imag().norm(), 1e-10 * (1 + sol.Gamma.norm()));

  // a harmonic column, so the dynamics residual sees it
  RegulatorSolution bad = sol;
  bad.Pi(0, bad.Pi.cols() - 1) += 1.0;
  EXPECT_GT(regulator_residual(c.model, c.kappa, exo, bad).first, 1e-3);
}

// u_reg itself does not depend on the feedback gain.
TEST_P(PaperModels, FeedforwardIndependentOfGain) {
  const Case c = paper_cases()[GetParam()];
  const auto a = compute_coefficients(c.model, c.kappa, c.signals);
  const auto b = compute_coefficients(c.model, 2.0 * c.kappa + 0.5, c.signals);
  for (int i = 0; i < 20; ++i) {
    const double t = 0.173 * i;
    EXPECT_LE((eval_ureg_complex(a, t) - eval_ureg_complex(b, t)).norm(),
              1e-8 * (1 + eval_ureg_complex(a, t).norm()))
        << c.name;
  }
}

TEST_P(PaperModels, SteadyStateMapMatchesSolution) {
  const Case c = paper_cases()[GetParam()];
  const auto exo = build_exosystem(c.signals);
  const auto sol = solve_regulator_equations(c.model, c.kappa, exo);
  const CMat Pi = steady_state_map(c.model, c.kappa, exo, sol.Gamma);
  EXPECT_LE((Pi - sol.Pi).norm(), 1e-10 * (1 + sol.Pi.norm()));
}

INSTANTIATE_TEST_SUITE_P(Models, PaperModels, ::testing::Values(0, 1, 2),
                         [](const auto& info) { return std::string(paper_cases()[info.param].name); });

TEST(Regulator, TransmissionZeroDetected) {
  // Two identical input columns make P_c singular at every frequency.
  Mat Bc(1, 2);
  Bc << 1, 1;
  const StateSpaceModel m(-Mat::Identity(1, 1), Bc, Mat::Zero(1, 1), Bc.transpose());
  SignalSpec s = SignalSpec::zeros(2, 1, {1.0});
  s.harmonics[0].a = cv({1.0, 0.0});
  EXPECT_THROW(compute_coefficients(m, 0.0, s), TransmissionZero);
  SignalSpec k = SignalSpec::zeros(2, 1);
  k.a0 = cv({1.0, 0.0});
  EXPECT_THROW(compute_coefficients(m, 0.0, k), ResolventFailure);
}

TEST(Regulator, ZeroFrequencyGate) {
  SignalSpec s = heat_paper_signals();
  EXPECT_THROW(compute_coefficients(build_heat2d({6}), 0.0, s), ResolventFailure);
  EXPECT_NO_THROW(compute_coefficients(build_heat2d({6}), 3.0, s));
}

TEST(Regulator, WaveResonanceNeedsFeedback) {
  const auto wave = build_wave1d({20});
  EXPECT_THROW(compute_coefficients(wave, 0.0, wave_paper_signals()), NearSingularResolvent);
  EXPECT_NO_THROW(compute_coefficients(wave, 0.75, wave_paper_signals()));
}

TEST(Regulator, DisturbanceMeasurement) {
  const auto toy = build_toy(-1.0);
  const auto z = measured_reference_from_disturbance(toy, 1.0, SignalSpec::zeros(1, 1, {2.0}));
  EXPECT_EQ(z.a0.norm(), 0.0);
  EXPECT_EQ(z.harmonics[0].a.norm() + z.harmonics[0].b.norm(), 0.0);

  for (const Case& c : paper_cases()) {
    if (std::string(c.name) == "wave20") continue;
    SignalSpec dist = c.signals;
    dist.a0.setZero();
    for (auto& h : dist.harmonics) {
      h.a.setZero();
      h.b.setZero();
    }
    SignalSpec combined = measured_reference_from_disturbance(c.model, c.kappa, dist);
    combined.c0 = dist.c0;
    for (std::size_t k = 0; k < combined.harmonics.size(); ++k) {
      combined.harmonics[k].c = dist.harmonics[k].c;
      combined.harmonics[k].d = dist.harmonics[k].d;
    }
    const auto coeffs = compute_coefficients(c.model, c.kappa, combined);
    for (int i = 0; i < 200; ++i) {
      const double t = 0.05 * i;
      EXPECT_LE((eval_ureg_complex(coeffs, t) + c.kappa * eval_reference(combined, t)).norm(), 1e-9) << c.name;
    }
  }
}

TEST(Margin, Examples) {
  const auto one = SaturationSpec::scalar({0.0}, {1.0});
  RegulatorCoefficients constant;
  constant.f0 = cv({0.25});
  EXPECT_DOUBLE_EQ(linear_regime_margin(constant, SaturationSpec::scalar({0.25}, {1.0})), 1.0);
  EXPECT_NEAR(linear_regime_margin(scalar_coeffs(1.0, 0.5, 0.5), one), 0.5, 1e-12);
  EXPECT_NEAR(linear_regime_margin(scalar_coeffs(1.0, 2.0, 2.0), one), -1.0, 1e-12);
}

TEST(Margin, GridChoice) {
  RegulatorCoefficients c = scalar_coeffs(pi, 1.0, 1.0);
  c.omegas.push_back(3 * pi);
  c.omegas.push_back(5 * pi);
  c.f.push_back(cv({0.0}));
  c.f.push_back(cv({0.0}));
  c.g = c.f;
  auto g = margin_grid(c);
  EXPECT_TRUE(g.commensurate);
  EXPECT_NEAR(g.t_end, 2.0, 1e-12);
  EXPECT_EQ(g.slack, 0.0);
  c.omegas[1] = std::sqrt(2.0);
  g = margin_grid(c);
  EXPECT_FALSE(g.commensurate);
  EXPECT_EQ(g.samples, 100000u);
  EXPECT_NEAR(g.t_end, 100.0 / std::sqrt(2.0), 1e-12);
  EXPECT_GT(g.slack, 0.0);
}

TEST(Margin, ScalingTowardsCenterClearance) {
  const auto heat = build_heat2d({15});
  const auto sat = SaturationSpec::scalar({-4.5, 2.5}, {7, 12.5});
  const auto coeffs = compute_coefficients(heat, 3.0, heat_paper_signals());
  double prev = -1e300;
  for (double s : {1.0, 0.5, 0.25, 0.1, 0.01, 1e-4}) {
    const double m = linear_regime_margin(coeffs.scaled(s), sat);
    EXPECT_GE(m, prev - 1e-12);
    prev = m;
  }
  EXPECT_NEAR(prev, sat.center_clearance(), 1e-3);
}

TEST(Regulator, CoefficientsCsv) {
  std::ostringstream out;
  write_coefficients_csv(out, scalar_coeffs(2.0, 1.0 - I, 1.0 + I));
  EXPECT_EQ(out.str(), "k,omega,re_f_1,im_f_1,re_g_1,im_g_1\n0,0,0,0,0,0\n1,2,1,-1,1,1\n");
}
