#pragma once

#include <string>
#include <vector>

#include "satreg/pde_models.hpp"
#include "satreg/saturation.hpp"
#include "satreg/signal_model.hpp"
#include "satreg/simulator.hpp"

namespace satreg {

struct ModelConfig {
  enum class Kind { Heat2d, Wave1d, Toy, MatrixFile };
  Kind kind = Kind::Toy;
  /// heat2d: modes per axis; wave1d: number of modes.
  int modes = 0;
  /// Resolution used for the feedforward coefficients (0 means same as modes).
  int coefficient_modes = 0;
  double rho = 1.0;
  double tension = 1.0;
  double a = -1.0;  // toy
  std::string path;              // matrix-file
  std::string coefficient_path;  // matrix-file, optional

  bool operator==(const ModelConfig&) const = default;
};

const char* model_kind_name(ModelConfig::Kind k);

struct InitialStateConfig {
  enum class Kind { Zero, Paper, SteadyState, Explicit };
  Kind kind = Kind::Zero;
  std::vector<double> values;  // Explicit

  bool operator==(const InitialStateConfig&) const = default;
};

struct SimulationSettings {
  double t_end = 1.0;
  double dt = 1e-3;
  int record_stride = 0;
  Scheme scheme = Scheme::ExponentialMidpoint;

  bool operator==(const SimulationSettings&) const = default;
};

/// Everything one experiment needs. Signal coefficient vectors left empty in
/// the file are zero-filled once the model dimensions are known.
struct ExperimentConfig {
  ModelConfig model;
  double kappa = 0.0;
  SaturationSpec saturation;
  SignalSpec signals;
  InitialStateConfig initial_state;
  SimulationSettings simulation;
  std::vector<cplx> lambdas;
  std::string output_dir = "out";
  /// Directory relative paths are resolved against (not serialized).
  std::string base_dir = ".";
};

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

/// Throws InvalidArgument with the offending key on any schema error.
ExperimentConfig parse_config(const std::string& json_text, const std::string& base_dir = ".");
ExperimentConfig load_config_file(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);
/// The "signals" object of the schema on its own.
std::string serialize_signals(const SignalSpec& s);

/// Parses a frequency: a number or an expression like "pi", "3pi", "3*pi",
/// "0.5*pi", "pi/2", "2.5".
double parse_frequency(const std::string& text);

/// Sets a dotted key of the serialized form (e.g. "kappa",
/// "model.modes_per_axis", "saturation.channels.1.radius") to a value given
/// as JSON text (bare words are taken as strings), then reparses.
ExperimentConfig with_override(const ExperimentConfig& cfg, const std::string& dotted_key, const std::string& value);

/// Copy of the signal spec with missing vectors zero-filled to the given sizes.
SignalSpec resolve_signals(const SignalSpec& spec, Eigen::Index output_dim, Eigen::Index disturbance_dim);

}  // namespace satreg
