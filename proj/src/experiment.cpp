#include "satreg/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ostream>

#include <json.hpp>

#include "satreg/matrix_io.hpp"
#include "satreg/pde_models.hpp"

namespace satreg {

namespace {

std::string resolve_path(const ExperimentConfig& cfg, const std::string& p) {
  const std::filesystem::path path(p);
  if (path.is_absolute()) return p;
  return (std::filesystem::path(cfg.base_dir) / path).string();
}

double energy_norm(const CVec& z, const StateSpaceModel& model) {
  if (!model.has_gram()) return z.norm();
  return std::sqrt(std::max(0.0, (z.adjoint() * model.gram().cast<cplx>() * z)(0, 0).real()));
}

}  // namespace

BuiltExperiment build_experiment(const ExperimentConfig& cfg) {
  const auto& m = cfg.model;
  const int cm = m.coefficient_modes > 0 ? m.coefficient_modes : m.modes;
  BuiltExperiment ex;
  switch (m.kind) {
    case ModelConfig::Kind::Heat2d:
      ex.sim_model = build_heat2d({m.modes});
      ex.coeff_model = cm == m.modes ? ex.sim_model : build_heat2d({cm});
      break;
    case ModelConfig::Kind::Wave1d:
      ex.sim_model = build_wave1d({m.modes, m.rho, m.tension});
      ex.coeff_model = cm == m.modes ? ex.sim_model : build_wave1d({cm, m.rho, m.tension});
      break;
    case ModelConfig::Kind::Toy:
      ex.sim_model = build_toy(m.a);
      ex.coeff_model = ex.sim_model;
      break;
    case ModelConfig::Kind::MatrixFile:
      ex.sim_model = read_model_file(resolve_path(cfg, m.path));
      ex.coeff_model =
          m.coefficient_path.empty() ? ex.sim_model : read_model_file(resolve_path(cfg, m.coefficient_path));
      break;
  }
  const auto& a = ex.sim_model;
  const auto& b = ex.coeff_model;
  if (a.inputs() != b.inputs() || a.disturbances() != b.disturbances()) {
    throw DimensionMismatch("simulation and coefficient models have different input/disturbance dimensions");
  }
  ex.signals = resolve_signals(cfg.signals, a.inputs(), a.disturbances());
  ex.signals.validate();
  if (ex.signals.output_dim() != a.inputs() || ex.signals.disturbance_dim() != a.disturbances()) {
    throw DimensionMismatch("signal dimensions do not match the model (" + std::to_string(a.inputs()) +
                            " outputs, " + std::to_string(a.disturbances()) + " disturbances)");
  }
  if (cfg.saturation.dim() != a.inputs()) {
    throw DimensionMismatch("saturation covers " + std::to_string(cfg.saturation.dim()) + " inputs, model has " +
                            std::to_string(a.inputs()));
  }
  ex.saturation = cfg.saturation;
  ex.kappa = cfg.kappa;
  return ex;
}

RegulateResult run_regulate(const BuiltExperiment& ex, Exec exec) {
  RegulateResult r;
  r.coeffs = compute_coefficients(ex.coeff_model, ex.kappa, ex.signals, exec);
  r.grid = margin_grid(r.coeffs);
  r.margin = linear_regime_margin(r.coeffs, ex.saturation, exec);
  return r;
}

Vec resolve_initial_state(const ExperimentConfig& cfg, const BuiltExperiment& ex, const RegulatorCoefficients& coeffs) {
  const auto n = ex.sim_model.states();
  switch (cfg.initial_state.kind) {
    case InitialStateConfig::Kind::Zero:
      return Vec::Zero(n);
    case InitialStateConfig::Kind::Paper:
      if (cfg.model.kind == ModelConfig::Kind::Heat2d) return heat_initial_state({cfg.model.modes});
      if (cfg.model.kind == ModelConfig::Kind::Wave1d) {
        return wave_initial_state({cfg.model.modes, cfg.model.rho, cfg.model.tension});
      }
      throw InvalidArgument("initial_state \"paper\" is only defined for heat2d and wave1d");
    case InitialStateConfig::Kind::SteadyState: {
      const Exosystem exo = build_exosystem(ex.signals);
      const CMat Pi = steady_state_map(ex.sim_model, ex.kappa, exo, feedforward_gain(coeffs, exo));
      return (Pi * exo.v0.cast<cplx>()).real();
    }
    case InitialStateConfig::Kind::Explicit: {
      if (static_cast<Eigen::Index>(cfg.initial_state.values.size()) != n) {
        throw DimensionMismatch("initial_state has " + std::to_string(cfg.initial_state.values.size()) +
                                " entries, model has " + std::to_string(n) + " states");
      }
      return Eigen::Map<const Vec>(cfg.initial_state.values.data(), n);
    }
  }
  return Vec::Zero(n);
}

SimulateResult run_simulate(const ExperimentConfig& cfg, Exec exec) {
  const BuiltExperiment ex = build_experiment(cfg);
  return run_simulate(cfg, ex, run_regulate(ex, exec), exec);
}

SimulateResult run_simulate(const ExperimentConfig& cfg, const BuiltExperiment& ex, const RegulateResult& reg,
                            Exec exec) {
  SimulateResult r;
  r.reg = reg;
  const Vec x0 = resolve_initial_state(cfg, ex, r.reg.coeffs);

  SimulationConfig sc;
  sc.t_end = cfg.simulation.t_end;
  sc.dt = cfg.simulation.dt;
  sc.kappa = cfg.kappa;
  sc.record_stride = cfg.simulation.record_stride;
  sc.scheme = cfg.simulation.scheme;
  sc.exec = exec;
  r.traj = simulate_closed_loop(ex.sim_model, ex.saturation, r.reg.coeffs, ex.signals, x0, sc);
  r.metrics = tracking_error_metrics(r.traj);

  const Exosystem exo = build_exosystem(ex.signals);
  const CMat Pi = steady_state_map(ex.sim_model, ex.kappa, exo, feedforward_gain(r.reg.coeffs, exo));
  double peak = 0.0;
  for (double t : r.traj.times) {
    peak = std::max(peak, energy_norm(Pi * exo_state(exo, t).cast<cplx>(), ex.sim_model));
  }
  const CVec z0 = x0.cast<cplx>() - Pi * exo.v0.cast<cplx>();
  r.state_bound = energy_norm(z0, ex.sim_model) + peak + 1e-3;
  const auto& w = r.metrics.window_norms;
  r.error_ratio = (w.size() >= 2 && w.front() > 0.0) ? w.back() / w.front() : 0.0;
  return r;
}

std::string metrics_json(const ExperimentConfig& cfg, const SimulateResult& r) {
  nlohmann::json j;
  j["model"] = model_kind_name(cfg.model.kind);
  j["kappa"] = cfg.kappa;
  j["dt"] = cfg.simulation.dt;
  j["t_end"] = cfg.simulation.t_end;
  j["scheme"] = scheme_name(cfg.simulation.scheme);
  j["steps"] = r.traj.steps;
  j["linear_regime_margin"] = r.reg.margin;
  j["margin_grid"] = {{"t_end", r.reg.grid.t_end},
                      {"samples", r.reg.grid.samples},
                      {"slack", r.reg.grid.slack},
                      {"commensurate", r.reg.grid.commensurate}};
  j["window_norms"] = r.metrics.window_norms;
  j["error_ratio"] = r.error_ratio;
  j["sup_xnorm"] = r.metrics.sup_xnorm;
  j["state_bound"] = r.state_bound;
  j["saturation_fraction"] = r.metrics.saturation_fraction;
  j["tail_mismatch"] = r.metrics.tail_mismatch;
  return j.dump(2) + "\n";
}

std::vector<SweepEntry> run_transfer(const BuiltExperiment& ex, const std::vector<cplx>& lambdas, Exec exec) {
  return transfer_sweep(ex.coeff_model, ex.kappa, lambdas, exec);
}

void write_transfer_csv(std::ostream& out, const std::vector<cplx>& lambdas, const std::vector<SweepEntry>& values) {
  Eigen::Index nu = 0, nd = 0;
  for (const auto& v : values) {
    if (v.value) {
      nu = v.value->Pc.rows();
      nd = v.value->Pd.cols();
      break;
    }
  }
  out << "re_lambda,im_lambda,status";
  for (Eigen::Index i = 1; i <= nu; ++i)
    for (Eigen::Index j = 1; j <= nu; ++j) out << ",re_Pc_" << i << j << ",im_Pc_" << i << j;
  for (Eigen::Index i = 1; i <= nu; ++i)
    for (Eigen::Index j = 1; j <= nd; ++j) out << ",re_Pd_" << i << j << ",im_Pd_" << i << j;
  out << ",sigma_min\n";
  char buf[64];
  auto num = [&](double x) {
    std::snprintf(buf, sizeof buf, ",%.17g", x);
    out << buf;
  };
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g", lambdas[k].real(), lambdas[k].imag());
    out << buf;
    const auto& v = values[k];
    if (!v.value) {
      out << ",gate_failure";
      for (Eigen::Index i = 0; i < 2 * nu * (nu + nd) + 1; ++i) out << ',';
      out << '\n';
      continue;
    }
    out << ",ok";
    for (Eigen::Index i = 0; i < nu; ++i)
      for (Eigen::Index j = 0; j < nu; ++j) {
        num(v.value->Pc(i, j).real());
        num(v.value->Pc(i, j).imag());
      }
    for (Eigen::Index i = 0; i < nu; ++i)
      for (Eigen::Index j = 0; j < nd; ++j) {
        num(v.value->Pd(i, j).real());
        num(v.value->Pd(i, j).imag());
      }
    num(v.value->resolvent_sigma_min);
    out << '\n';
  }
}

MeasureResult run_measure_disturbance(const BuiltExperiment& ex, Exec exec) {
  MeasureResult r;
  r.measured = measured_reference_from_disturbance(ex.coeff_model, ex.kappa, ex.signals, exec);
  SignalSpec combined = r.measured;
  combined.c0 = ex.signals.c0;
  for (std::size_t k = 0; k < combined.harmonics.size(); ++k) {
    combined.harmonics[k].c = ex.signals.harmonics[k].c;
    combined.harmonics[k].d = ex.signals.harmonics[k].d;
  }
  const RegulatorCoefficients coeffs = compute_coefficients(ex.coeff_model, ex.kappa, combined, exec);
  const double span = margin_grid(coeffs).t_end;
  for (int i = 0; i < 1000; ++i) {
    const double t = span * i / 1000.0;
    const CVec s = eval_ureg_complex(coeffs, t) + ex.kappa * eval_reference(combined, t);
    r.identity_error = std::max(r.identity_error, s.norm());
  }
  return r;
}

}  // namespace satreg
