#pragma once

#include <utility>
#include <vector>

#include "satreg/signal_model.hpp"
#include "satreg/state_space.hpp"

namespace satreg {

/// Neumann heat equation on the unit square with boundary inputs on
/// Gamma_1 = [0, 1/2] x {0} (u_1 and the disturbance) and
/// Gamma_2 = [1/2, 1] x {1} (u_2); outputs are the boundary integrals.
struct HeatModelConfig {
  int modes_per_axis = 31;
};

/// Wave equation rho v_tt = (T v_x)_x on [0, 1], control and velocity
/// output at x = 0, disturbance force at x = 1. Constant coefficients only.
struct WaveModelConfig {
  int n_modes = 30;
  double rho = 1.0;
  double tension = 1.0;
};

/// Mode index pairs (m, n), 0 <= m, n < N, sorted by (m + n, m).
std::vector<std::pair<int, int>> heat_mode_order(int modes_per_axis);

/// Modal model in the orthonormal cosine basis c_m c_n cos(m pi x) cos(n pi y),
/// c_0 = 1, c_m = sqrt 2: A = diag(-(m^2 + n^2) pi^2), C = B_c^T, B_d = B_c(:, 0).
StateSpaceModel build_heat2d(const HeatModelConfig& cfg);

/// Modal coefficients of x0(x, y) = -10 (1 + cos(pi (1 - x))) (1 - cos(2 pi y) / 4).
Vec heat_initial_state(const HeatModelConfig& cfg);

/// State (p_0..p_{N-1}, s_1..s_{N-1}): momentum in the cosine basis and strain
/// in the sine basis, so the energy is half the squared Euclidean norm.
/// p_m' = -m pi c s_m + (c_m / sqrt rho)(u + (-1)^m w), s_m' = m pi c p_m,
/// c = sqrt(T / rho).
StateSpaceModel build_wave1d(const WaveModelConfig& cfg);

/// Coordinates of (rho v_1, v_0') for v_0 = (1 + cos(3 pi x) + cos(6 x)) / 2, v_1 = 0.
Vec wave_initial_state(const WaveModelConfig& cfg);

/// Closed-form closed-loop transfer values (P_c^kappa(i w), P_d^kappa(i w)) of
/// the wave boundary value problem. Throws DegenerateBVP when the
/// denominator i kappa w cos k - T k sin k, k = w sqrt(rho / T), is at most
/// 1e-12 in modulus.
std::pair<cplx, cplx> wave_transfer_exact(double omega, double kappa, double rho = 1.0, double tension = 1.0);

/// Heat closed-loop transfer from the modal series truncated at
/// modes_per_axis = truncation, combined through (I + kappa P_c)^{-1}.
/// Needs lambda away from every heat eigenvalue, so lambda = 0 is rejected
/// for all kappa (use closed_loop_transfer on the built model there).
TransferValue heat_transfer_series(cplx lambda, double kappa, int truncation);

/// Scalar model A = a, B_c = B_d = C = 1.
StateSpaceModel build_toy(double a);

/// Reference (1 + sin(pi t), 2 + cos(pi t)/2 + cos(3 pi t)), disturbance
/// 2 + 3 cos(5 pi t).
SignalSpec heat_paper_signals();

/// Reference sin(pi t) + cos(3 pi t), disturbance cos(5 pi t) / 2.
SignalSpec wave_paper_signals();

}  // namespace satreg
