#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "satreg/pde_models.hpp"

using namespace satreg;
using std::numbers::pi;

namespace {

const cplx I(0.0, 1.0);

double cm(int m) { return m == 0 ? 1.0 : std::sqrt(2.0); }

// Composite Simpson on [a, b] with n (even) intervals.
template <class F>
double simpson(F f, double a, double b, int n = 4000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

Eigen::Index heat_index(int N, int m, int n) {
  const auto order = heat_mode_order(N);
  for (std::size_t j = 0; j < order.size(); ++j)
    if (order[j] == std::make_pair(m, n)) return Eigen::Index(j);
  return -1;
}

double rel_err(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(Heat, ModeOrder) {
  const auto o = heat_mode_order(3);
  const std::vector<std::pair<int, int>> expected{{0, 0}, {0, 1}, {1, 0}, {0, 2}, {1, 1}, {2, 0}, {1, 2}, {2, 1}, {2, 2}};
  EXPECT_EQ(o, expected);
  EXPECT_THROW(heat_mode_order(0), InvalidArgument);
}

TEST(Heat, MatrixEntries) {
  const int N = 5;
  const auto heat = build_heat2d({N});
  EXPECT_EQ(heat.states(), N * N);
  EXPECT_EQ(heat.inputs(), 2);
  EXPECT_EQ(heat.disturbances(), 1);
  const auto j12 = heat_index(N, 1, 2);
  EXPECT_NEAR(heat.A()(j12, j12), -5 * pi * pi, 1e-12);
  EXPECT_DOUBLE_EQ(heat.Bc()(heat_index(N, 0, 0), 0), 0.5);
  EXPECT_EQ(heat.C(), heat.Bc().transpose());
  EXPECT_EQ(heat.Bd().col(0), heat.Bc().col(0));
}

// B_c against quadrature of the basis over the two boundary pieces.
TEST(Heat, InputMatrixMatchesQuadrature) {
  const int N = 7;
  const auto heat = build_heat2d({N});
  for (int m = 0; m < N; ++m)
    for (int n = 0; n < N; ++n) {
      const auto j = heat_index(N, m, n);
      // Gamma_1 = [0, 1/2] x {0}; Gamma_2 = [1/2, 1] x {1}
      const double b1 = simpson([&](double x) { return cm(m) * cm(n) * std::cos(m * pi * x); }, 0.0, 0.5);
      const double b2 = simpson([&](double x) { return cm(m) * cm(n) * std::cos(m * pi * x) * std::cos(n * pi); },
                                0.5, 1.0);
      EXPECT_NEAR(heat.Bc()(j, 0), b1, 1e-12) << m << "," << n;
      EXPECT_NEAR(heat.Bc()(j, 1), b2, 1e-12) << m << "," << n;
    }
}

TEST(Heat, InitialStateExamples) {
  const int N = 6;
  const Vec x = heat_initial_state({N});
  EXPECT_NEAR(x(heat_index(N, 0, 0)), -10.0, 1e-14);
  EXPECT_NEAR(x(heat_index(N, 1, 0)), 5 * std::sqrt(2.0), 1e-14);
  EXPECT_EQ(x(heat_index(N, 2, 2)), 0.0);
}

// Every coefficient against a tensor Simpson rule of <x0, phi_mn>.
TEST(Heat, InitialStateMatchesQuadrature) {
  const int N = 4;
  const Vec x = heat_initial_state({N});
  auto fx = [](double s) { return -10.0 * (1.0 + std::cos(pi * (1.0 - s))); };
  auto fy = [](double s) { return 1.0 - std::cos(2 * pi * s) / 4.0; };
  for (int m = 0; m < N; ++m)
    for (int n = 0; n < N; ++n) {
      const double qx = simpson([&](double s) { return fx(s) * cm(m) * std::cos(m * pi * s); }, 0.0, 1.0);
      const double qy = simpson([&](double s) { return fy(s) * cm(n) * std::cos(n * pi * s); }, 0.0, 1.0);
      EXPECT_NEAR(x(heat_index(N, m, n)), qx * qy, 1e-11) << m << "," << n;
    }
}

TEST(Wave, MatrixEntries) {
  const auto wave = build_wave1d({30});
  EXPECT_EQ(wave.states(), 59);
  EXPECT_EQ((wave.A() + wave.A().transpose()).norm(), 0.0);
  EXPECT_DOUBLE_EQ(wave.Bc()(2, 0), std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(wave.Bc()(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(wave.Bd()(3, 0), -std::sqrt(2.0));
  EXPECT_EQ(wave.C(), wave.Bc().transpose());
  EXPECT_THROW(build_wave1d({0}), InvalidArgument);
  EXPECT_THROW(build_wave1d({10, -1.0, 1.0}), InvalidArgument);
}

// Strain coordinates s_m = -sqrt(T) <v0', sqrt2 sin(m pi x)> by quadrature.
TEST(Wave, InitialStateMatchesQuadrature) {
  const int N = 12;
  const Vec x = wave_initial_state({N});
  auto dv = [](double s) { return -(3 * pi * std::sin(3 * pi * s) + 6 * std::sin(6 * s)) / 2.0; };
  for (int m = 0; m < N; ++m) EXPECT_EQ(x(m), 0.0);
  for (int m = 1; m < N; ++m) {
    const double q = -simpson([&](double s) { return dv(s) * std::sqrt(2.0) * std::sin(m * pi * s); }, 0.0, 1.0);
    EXPECT_NEAR(x(N + m - 1), q, 1e-10) << m;
  }
}

TEST(Wave, ExactTransferExamples) {
  auto [pc, pd] = wave_transfer_exact(pi, 0.75);
  EXPECT_NEAR(std::abs(pc - 4.0 / 3.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(pd + 1.0 / 0.75), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(wave_transfer_exact(pi, 2.0).second + 0.5), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(wave_transfer_exact(pi / 2, 0.75).first), 0.0, 1e-15);
  EXPECT_THROW(wave_transfer_exact(pi, 0.0), DegenerateBVP);
}

// Closed-form values solve the boundary value problem
// -w^2 rho v = T v'', -T v'(0) + i kappa w v(0) = u, T v'(1) = w_d, y = i w v(0).
TEST(Wave, ExactTransferSolvesBoundaryProblem) {
  const double rho = 2.0, T = 0.5, kappa = 0.9;
  for (double w : {0.7, 2.0, 5.3}) {
    const double k = w * std::sqrt(rho / T);
    // v = al cos(k x) + be sin(k x)
    Eigen::Matrix2cd M;
    M << I * kappa * w, -T * k, -T * k * std::sin(k), T * k * std::cos(k);
    const Eigen::Vector2cd u_resp = M.fullPivLu().solve(Eigen::Vector2cd(1.0, 0.0));
    const Eigen::Vector2cd d_resp = M.fullPivLu().solve(Eigen::Vector2cd(0.0, 1.0));
    const auto [pc, pd] = wave_transfer_exact(w, kappa, rho, T);
    EXPECT_NEAR(std::abs(pc - I * w * u_resp(0)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(pd - I * w * d_resp(0)), 0.0, 1e-12);
  }
}

TEST(Wave, ModalModelConvergesToExact) {
  const auto w40 = build_wave1d({40});
  const auto w80 = build_wave1d({80});
  for (double w : {pi, 3 * pi, 5 * pi}) {
    const auto [pc, pd] = wave_transfer_exact(w, 0.75);
    const auto a = closed_loop_transfer(w40, 0.75, cplx(0, w));
    const auto b = closed_loop_transfer(w80, 0.75, cplx(0, w));
    const double e40 = rel_err(a.Pc(0, 0), pc), e80 = rel_err(b.Pc(0, 0), pc);
    EXPECT_LE(e40, 0.05) << w;
    EXPECT_TRUE(e80 < e40 || (e40 <= 1e-12 && e80 <= 1e-12)) << w << " " << e40 << " " << e80;
    EXPECT_LE(rel_err(a.Pd(0, 0), pd), 0.05) << w;
  }
  // off the harmonic frequencies the truncation error is visible and shrinks
  const auto [pc4, pd4] = wave_transfer_exact(4.0, 0.75);
  (void)pd4;
  const double e40 = rel_err(closed_loop_transfer(w40, 0.75, cplx(0, 4.0)).Pc(0, 0), pc4);
  const double e80 = rel_err(closed_loop_transfer(w80, 0.75, cplx(0, 4.0)).Pc(0, 0), pc4);
  EXPECT_GT(e40, 1e-6);
  EXPECT_LT(e80, e40);
  EXPECT_LE(e40, 0.05);
}

TEST(Wave, ResonanceOnlyWithFeedback) {
  const auto wave = build_wave1d({30});
  EXPECT_THROW(transfer(wave, cplx(0, 5 * pi)), NearSingularResolvent);
  EXPECT_NO_THROW(closed_loop_transfer(wave, 0.75, cplx(0, 5 * pi)));
}

TEST(HeatSeries, MatchesBuiltModel) {
  const auto heat = build_heat2d({12});
  for (cplx lambda : {cplx(0, pi), cplx(2.0, 0.0), cplx(0, 5 * pi)}) {
    const auto s = heat_transfer_series(lambda, 3.0, 12);
    const auto m = closed_loop_transfer(heat, 3.0, lambda);
    EXPECT_LE((s.Pc - m.Pc).norm(), 1e-10 * m.Pc.norm());
    EXPECT_LE((s.Pd - m.Pd).norm(), 1e-10 * m.Pd.norm());
  }
}

TEST(HeatSeries, RefinementConverges) {
  const cplx lambda(0, 3 * pi);
  const auto p20 = heat_transfer_series(lambda, 3.0, 20);
  const auto p40 = heat_transfer_series(lambda, 3.0, 40);
  const auto p80 = heat_transfer_series(lambda, 3.0, 80);
  const double d1 = (p40.Pc - p20.Pc).norm(), d2 = (p80.Pc - p40.Pc).norm();
  EXPECT_GT(d1, 0.0);
  EXPECT_LT(d2, d1);
}

TEST(HeatSeries, PositiveRealAxisHermitian) {
  const auto p = heat_transfer_series(cplx(1.5, 0.0), 0.0, 25);
  EXPECT_LE((p.Pc - p.Pc.adjoint()).norm(), 1e-14);
  Eigen::SelfAdjointEigenSolver<CMat> es(p.Pc);
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-14);
}

TEST(HeatSeries, ZeroRejected) {
  EXPECT_THROW(heat_transfer_series(0.0, 0.0, 10), NearSingularResolvent);
  EXPECT_THROW(heat_transfer_series(0.0, 3.0, 10), NearSingularResolvent);
}

TEST(Toy, Basics) {
  const auto toy = build_toy(-1.0);
  EXPECT_TRUE(check_passivity(toy).passive);
  EXPECT_NEAR(std::abs(transfer(toy, I).Pc(0, 0) - 1.0 / (I + 1.0)), 0.0, 1e-15);
  EXPECT_THROW(build_toy(0.0), InvalidArgument);
  EXPECT_THROW(build_toy(0.5), InvalidArgument);
}

TEST(PaperSignals, Shapes) {
  const auto h = heat_paper_signals();
  EXPECT_EQ(h.output_dim(), 2);
  EXPECT_EQ(h.disturbance_dim(), 1);
  EXPECT_EQ(h.harmonics.size(), 3u);
  const auto w = wave_paper_signals();
  EXPECT_EQ(w.output_dim(), 1);
  EXPECT_NEAR(eval_reference(w, 0.25)(0).real(), std::sin(pi / 4) + std::cos(3 * pi / 4), 1e-15);
}
