#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "satreg/config.hpp"
#include "satreg/kernels.hpp"
#include "satreg/regulator.hpp"
#include "satreg/simulator.hpp"

namespace satreg {

/// Models and resolved signals for one configuration.
struct BuiltExperiment {
  StateSpaceModel sim_model;
  StateSpaceModel coeff_model;
  SignalSpec signals;
  SaturationSpec saturation;
  double kappa = 0.0;
};

BuiltExperiment build_experiment(const ExperimentConfig& cfg);

struct RegulateResult {
  RegulatorCoefficients coeffs;
  MarginGrid grid;
  double margin = 0.0;
};

RegulateResult run_regulate(const BuiltExperiment& ex, Exec exec = Exec::Parallel);

/// Initial state requested by the config. "steady-state" gives Re(Pi v0) for
/// the simulation model driven by the given coefficients.
Vec resolve_initial_state(const ExperimentConfig& cfg, const BuiltExperiment& ex, const RegulatorCoefficients& coeffs);

struct SimulateResult {
  RegulateResult reg;
  SimulationTrajectory traj;
  TrackingMetrics metrics;
  /// |x0 - Pi v0| + max_i |Pi v(t_i)| + 1e-3 (energy norm), with Pi the
  /// steady-state map of the simulation model under the computed u_reg.
  double state_bound = 0.0;
  /// Last window norm over the first one.
  double error_ratio = 0.0;
};

SimulateResult run_simulate(const ExperimentConfig& cfg, Exec exec = Exec::Parallel);
/// Same, reusing an already built experiment and its coefficients.
SimulateResult run_simulate(const ExperimentConfig& cfg, const BuiltExperiment& ex, const RegulateResult& reg,
                            Exec exec = Exec::Parallel);

std::string metrics_json(const ExperimentConfig& cfg, const SimulateResult& r);

/// Transfer values of the coefficient model at the given points.
std::vector<SweepEntry> run_transfer(const BuiltExperiment& ex, const std::vector<cplx>& lambdas,
                                     Exec exec = Exec::Parallel);
void write_transfer_csv(std::ostream& out, const std::vector<cplx>& lambdas, const std::vector<SweepEntry>& values);

struct MeasureResult {
  SignalSpec measured;  // reference part; disturbance part zero
  double identity_error = 0.0;  // max |u_reg + kappa y_ref| over 1000 samples
};

MeasureResult run_measure_disturbance(const BuiltExperiment& ex, Exec exec = Exec::Parallel);

}  // namespace satreg
