#include "satreg/pde_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/LU>
#include <Eigen/SVD>

namespace satreg {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

double basis_scale(int m) { return m == 0 ? 1.0 : kSqrt2; }

// sin(m pi / 2) without rounding.
double sin_half_pi(int m) {
  switch (m % 4) {
    case 1:
      return 1.0;
    case 3:
      return -1.0;
    default:
      return 0.0;
  }
}

double parity(int m) { return (m % 2 == 0) ? 1.0 : -1.0; }

// Integrals of cos(m pi x) over [0, 1/2] and [1/2, 1].
double left_half_integral(int m) { return m == 0 ? 0.5 : sin_half_pi(m) / (m * M_PI); }
double right_half_integral(int m) { return m == 0 ? 0.5 : -sin_half_pi(m) / (m * M_PI); }

Mat heat_input_matrix(const std::vector<std::pair<int, int>>& modes) {
  Mat B(static_cast<Eigen::Index>(modes.size()), 2);
  for (std::size_t j = 0; j < modes.size(); ++j) {
    const auto [m, n] = modes[j];
    const double s = basis_scale(m) * basis_scale(n);
    B(j, 0) = s * left_half_integral(m);
    B(j, 1) = s * parity(n) * right_half_integral(m);
  }
  return B;
}

void check_heat(const HeatModelConfig& cfg) {
  if (cfg.modes_per_axis < 1) throw InvalidArgument("heat model: modes_per_axis must be >= 1");
}

void check_wave(const WaveModelConfig& cfg) {
  if (cfg.n_modes < 1) throw InvalidArgument("wave model: n_modes must be >= 1");
  if (!(cfg.rho > 0.0) || !std::isfinite(cfg.rho) || !(cfg.tension > 0.0) || !std::isfinite(cfg.tension)) {
    throw InvalidArgument("wave model: rho and tension must be positive constants");
  }
}

Vec real_vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

std::vector<std::pair<int, int>> heat_mode_order(int N) {
  if (N < 1) throw InvalidArgument("heat model: modes_per_axis must be >= 1");
  std::vector<std::pair<int, int>> modes;
  modes.reserve(static_cast<std::size_t>(N) * N);
  for (int m = 0; m < N; ++m)
    for (int n = 0; n < N; ++n) modes.emplace_back(m, n);
  std::sort(modes.begin(), modes.end(), [](const auto& a, const auto& b) {
    const int sa = a.first + a.second, sb = b.first + b.second;
    return sa != sb ? sa < sb : a.first < b.first;
  });
  return modes;
}

StateSpaceModel build_heat2d(const HeatModelConfig& cfg) {
  check_heat(cfg);
  const auto modes = heat_mode_order(cfg.modes_per_axis);
  const auto n = static_cast<Eigen::Index>(modes.size());
  Mat A = Mat::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto [m, k] = modes[j];
    A(j, j) = -double(m * m + k * k) * M_PI * M_PI;
  }
  const Mat B = heat_input_matrix(modes);
  StateSpaceModel model(A, B, B.col(0), B.transpose());
  model.input_labels = {"u1", "u2"};
  model.disturbance_labels = {"wd"};
  return model;
}

Vec heat_initial_state(const HeatModelConfig& cfg) {
  check_heat(cfg);
  const auto modes = heat_mode_order(cfg.modes_per_axis);
  Vec x = Vec::Zero(static_cast<Eigen::Index>(modes.size()));
  for (std::size_t j = 0; j < modes.size(); ++j) {
    const auto mode = modes[j];
    if (mode == std::make_pair(0, 0)) x[j] = -10.0;
    if (mode == std::make_pair(1, 0)) x[j] = 5.0 * kSqrt2;
    if (mode == std::make_pair(0, 2)) x[j] = 1.25 * kSqrt2;
    if (mode == std::make_pair(1, 2)) x[j] = -1.25;
  }
  return x;
}

StateSpaceModel build_wave1d(const WaveModelConfig& cfg) {
  check_wave(cfg);
  const int N = cfg.n_modes;
  const Eigen::Index n = 2 * N - 1;
  const double c = std::sqrt(cfg.tension / cfg.rho);
  const double inv_sqrt_rho = 1.0 / std::sqrt(cfg.rho);
  Mat A = Mat::Zero(n, n);
  Mat Bc(n, 1), Bd(n, 1);
  Bc.setZero();
  Bd.setZero();
  for (int m = 0; m < N; ++m) {
    Bc(m, 0) = basis_scale(m) * inv_sqrt_rho;
    Bd(m, 0) = basis_scale(m) * parity(m) * inv_sqrt_rho;
    if (m > 0) {
      const Eigen::Index s = N + m - 1;
      A(m, s) = -m * M_PI * c;
      A(s, m) = m * M_PI * c;
    }
  }
  StateSpaceModel model(A, Bc, Bd, Bc.transpose());
  model.input_labels = {"u"};
  model.disturbance_labels = {"wd3"};
  return model;
}

Vec wave_initial_state(const WaveModelConfig& cfg) {
  check_wave(cfg);
  const int N = cfg.n_modes;
  Vec x = Vec::Zero(2 * N - 1);
  // v0' = -(3 pi sin(3 pi x) + 6 sin(6 x)) / 2 and s_m = -sqrt(T) <v0', sqrt2 sin(m pi x)>.
  const double sqrtT = std::sqrt(cfg.tension);
  for (int m = 1; m < N; ++m) {
    const double mp = m * M_PI;
    const double proj_a = (m == 3) ? kSqrt2 / 2.0 : 0.0;
    const double proj_b = kSqrt2 * parity(m) * std::sin(6.0) * mp / (36.0 - mp * mp);
    x[N + m - 1] = sqrtT * 0.5 * (3.0 * M_PI * proj_a + 6.0 * proj_b);
  }
  return x;
}

std::pair<cplx, cplx> wave_transfer_exact(double omega, double kappa, double rho, double tension) {
  if (!(rho > 0.0) || !(tension > 0.0)) throw InvalidArgument("wave_transfer_exact: rho and tension must be positive");
  const double k = omega * std::sqrt(rho / tension);
  const cplx I(0.0, 1.0);
  const cplx den = I * kappa * omega * std::cos(k) - tension * k * std::sin(k);
  if (std::abs(den) <= 1e-12) throw DegenerateBVP("wave boundary value problem is singular at omega = " +
                                                   std::to_string(omega));
  return {I * omega * std::cos(k) / den, I * omega / den};
}

TransferValue heat_transfer_series(cplx lambda, double kappa, int truncation) {
  const auto modes = heat_mode_order(truncation);
  const Mat B = heat_input_matrix(modes);
  double anorm2 = 0.0;
  for (const auto& [m, n] : modes) anorm2 += std::pow(double(m * m + n * n) * M_PI * M_PI, 2);
  const double thr = 1e-10 * (1.0 + std::sqrt(anorm2));

  // Sum from the fastest mode down so the small terms accumulate first.
  CMat P = CMat::Zero(2, 3);
  double smin = std::numeric_limits<double>::infinity();
  for (std::size_t j = modes.size(); j-- > 0;) {
    const auto [m, n] = modes[j];
    const cplx d = lambda + double(m * m + n * n) * M_PI * M_PI;
    smin = std::min(smin, std::abs(d));
    if (std::abs(d) <= thr) throw NearSingularResolvent(lambda, std::abs(d), thr);
    const double b1 = B(j, 0), b2 = B(j, 1);
    P(0, 0) += b1 * b1 / d;
    P(0, 1) += b1 * b2 / d;
    P(1, 0) += b2 * b1 / d;
    P(1, 1) += b2 * b2 / d;
  }
  P.col(2) = P.col(0);

  const CMat loop = CMat::Identity(2, 2) + kappa * P.leftCols(2);
  Eigen::JacobiSVD<CMat> svd(loop);
  const auto& s = svd.singularValues();
  if (!(s[1] > 0.0) || s[0] / s[1] >= 1e12) {
    throw FeedbackLoopSingular("I + kappa P_c is singular at lambda = " + format_complex(lambda));
  }
  const CMat Pk = loop.partialPivLu().solve(P);
  TransferValue tv;
  tv.lambda = lambda;
  tv.kappa = kappa;
  tv.Pc = Pk.leftCols(2);
  tv.Pd = Pk.rightCols(1);
  tv.resolvent_sigma_min = smin;
  tv.resolvent_valid = true;
  return tv;
}

StateSpaceModel build_toy(double a) {
  if (!(a < 0.0)) throw InvalidArgument("toy model requires a < 0");
  StateSpaceModel model(Mat::Constant(1, 1, a), Mat::Ones(1, 1), Mat::Ones(1, 1), Mat::Ones(1, 1));
  model.input_labels = {"u"};
  model.disturbance_labels = {"wd"};
  return model;
}

SignalSpec heat_paper_signals() {
  const double pi = M_PI;
  SignalSpec s = SignalSpec::zeros(2, 1, {pi, 3.0 * pi, 5.0 * pi});
  s.a0 = real_vec({1.0, 2.0}).cast<cplx>();
  s.c0 = real_vec({2.0}).cast<cplx>();
  s.harmonics[0].a = real_vec({0.0, 0.5}).cast<cplx>();
  s.harmonics[0].b = real_vec({1.0, 0.0}).cast<cplx>();
  s.harmonics[1].a = real_vec({0.0, 1.0}).cast<cplx>();
  s.harmonics[2].c = real_vec({3.0}).cast<cplx>();
  return s;
}

SignalSpec wave_paper_signals() {
  const double pi = M_PI;
  SignalSpec s = SignalSpec::zeros(1, 1, {pi, 3.0 * pi, 5.0 * pi});
  s.harmonics[0].b = real_vec({1.0}).cast<cplx>();
  s.harmonics[1].a = real_vec({1.0}).cast<cplx>();
  s.harmonics[2].c = real_vec({0.5}).cast<cplx>();
  return s;
}

}  // namespace satreg
