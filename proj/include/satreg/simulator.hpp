#pragma once

#include <iosfwd>
#include <vector>

#include "satreg/kernels.hpp"
#include "satreg/regulator.hpp"
#include "satreg/saturation.hpp"
#include "satreg/signal_model.hpp"
#include "satreg/state_space.hpp"

namespace satreg {

enum class Scheme {
  /// x+ = e^{hA} x + h phi_1(hA) N(x, t). First order.
  ExponentialEuler,
  /// Two-stage exponential Runge-Kutta with c_2 = 1/2. Second order, also for
  /// stiff A.
  ExponentialMidpoint,
};

const char* scheme_name(Scheme s);
/// Accepts "exp-euler" and "exp-midpoint".
Scheme parse_scheme(const std::string& name);

struct SimulationConfig {
  double t_end = 1.0;
  double dt = 1e-3;
  double kappa = 0.0;
  /// Record every stride-th step; 0 picks the smallest stride giving at most
  /// 20000 recorded samples.
  int record_stride = 0;
  Scheme scheme = Scheme::ExponentialMidpoint;
  bool store_states = false;
  /// Replace phi by the identity (linear reference runs).
  bool bypass_saturation = false;
  Exec exec = Exec::Parallel;

  /// Throws InvalidArgument unless 0 < dt <= t_end, t_end / dt is an integer
  /// (to 1e-9 relative) and dt * max w_k <= 0.1.
  void validate(const SignalSpec& signals) const;
  std::size_t steps() const;
  int effective_stride() const;
};

struct SimulationTrajectory {
  std::vector<double> times;
  std::vector<Vec> states;  // only with store_states
  std::vector<Vec> outputs;
  std::vector<Vec> references;
  std::vector<Vec> errors;
  std::vector<Vec> controls;            // u before saturation
  std::vector<Vec> saturated_controls;  // phi(u)
  std::vector<Vec> feedforward;         // u_reg
  std::vector<double> xnorm;            // |x|_M
  std::vector<char> sat_active;
  Vec final_state;
  std::size_t steps = 0;
  /// Steps (of all steps, recorded or not) at which phi clipped some channel.
  std::size_t active_steps = 0;

  std::size_t size() const { return times.size(); }
};

/// Integrates x' = A x + B_c phi(u_reg + kappa (y_ref - C x)) + B_d w_d with
/// the control evaluated explicitly at each stage. Requires real signals and
/// real saturation centers. Throws NumericalBlowup on non-finite states.
SimulationTrajectory simulate_closed_loop(const StateSpaceModel& model, const SaturationSpec& sat,
                                          const RegulatorCoefficients& coeffs, const SignalSpec& signals,
                                          const Vec& x0, const SimulationConfig& cfg);

struct TrackingMetrics {
  /// L2 norm of e on [k, k + 1] for k = 0, 1, ... while the window fits.
  std::vector<double> window_norms;
  double sup_xnorm = 0.0;
  /// Fraction of all time steps with an active saturation.
  double saturation_fraction = 0.0;
  /// Mean of |phi(u) - u_reg| over the last 10% of the recorded samples.
  double tail_mismatch = 0.0;
};

/// Trapezoidal L2 norm of the recorded error over [t0, t1].
double windowed_error_norm(const SimulationTrajectory& traj, double t0, double t1);

TrackingMetrics tracking_error_metrics(const SimulationTrajectory& traj);

struct ConvergenceReport {
  std::vector<double> dts;
  /// |x_final(dt) - x_final(finest)| for every dt but the finest.
  std::vector<double> errors;
  /// log2(d_i / d_{i+1}) with d_i = |x_final(dts[i]) - x_final(dts[i + 1])|.
  std::vector<double> orders;
  double observed_order = 0.0;  // last entry of orders
};

/// Runs the simulation at every dt (at least three, each half the previous)
/// and estimates the order from successive differences of the final states.
ConvergenceReport convergence_study(const StateSpaceModel& model, const SaturationSpec& sat,
                                    const RegulatorCoefficients& coeffs, const SignalSpec& signals,
                                    const Vec& x0, const SimulationConfig& cfg, const std::vector<double>& dts);

/// Header t,y_1..,yref_1..,e_1..,u_1..,phi_u_1..,xnorm,sat_active; values
/// with 17 significant digits.
void write_trajectory_csv(std::ostream& out, const SimulationTrajectory& traj);

}  // namespace satreg
