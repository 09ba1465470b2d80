#include "satreg/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace satreg {

const char* scheme_name(Scheme s) { return s == Scheme::ExponentialEuler ? "exp-euler" : "exp-midpoint"; }

Scheme parse_scheme(const std::string& name) {
  if (name == "exp-euler") return Scheme::ExponentialEuler;
  if (name == "exp-midpoint") return Scheme::ExponentialMidpoint;
  throw InvalidArgument("unknown integration scheme '" + name + "' (expected exp-euler or exp-midpoint)");
}

std::size_t SimulationConfig::steps() const { return static_cast<std::size_t>(std::llround(t_end / dt)); }

int SimulationConfig::effective_stride() const {
  if (record_stride > 0) return record_stride;
  const std::size_t n = steps();
  return static_cast<int>(std::max<std::size_t>(1, (n + 19999) / 20000));
}

void SimulationConfig::validate(const SignalSpec& signals) const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("simulation: dt must be positive");
  if (!(t_end >= dt) || !std::isfinite(t_end)) throw InvalidArgument("simulation: need dt <= t_end");
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw InvalidArgument("simulation: kappa must be >= 0");
  if (record_stride < 0) throw InvalidArgument("simulation: record_stride must be positive (or 0 for auto)");
  const double n = t_end / dt;
  if (std::abs(n - std::round(n)) > 1e-9 * n) {
    throw InvalidArgument("simulation: t_end must be an integer multiple of dt");
  }
  if (!signals.harmonics.empty() && dt * signals.max_omega() > 0.1) {
    throw InvalidArgument("simulation: dt * max omega exceeds 0.1");
  }
}

namespace {

double xnorm_of(const Vec& x, const Mat* gram) {
  if (!gram) return x.norm();
  return std::sqrt(std::max(0.0, x.dot(*gram * x)));
}

struct ClosedLoopRhs {
  const StateSpaceModel& model;
  const SaturationSpec& sat;
  const RegulatorCoefficients& coeffs;
  const SignalSpec& signals;
  double kappa;
  bool bypass;

  struct Sample {
    Vec y, yref, u, phi_u, ureg;
    bool active = false;
  };

  // N(x, t) = B_c phi(u) + B_d w_d(t); fills the sample when asked.
  Vec operator()(const Vec& x, double t, Sample* out = nullptr) const {
    Vec y = model.C() * x;
    Vec yref = eval_reference(signals, t).real();
    Vec ureg = eval_ureg(coeffs, t);
    Vec u = ureg + kappa * (yref - y);
    Vec phi_u = bypass ? u : saturate(sat, u);
    Vec rhs = model.Bc() * phi_u;
    if (model.disturbances() > 0) rhs += model.Bd() * eval_disturbance(signals, t).real();
    if (out) {
      out->active = !bypass && saturation_active(sat, u);
      out->y = std::move(y);
      out->yref = std::move(yref);
      out->u = std::move(u);
      out->phi_u = std::move(phi_u);
      out->ureg = std::move(ureg);
    }
    return rhs;
  }
};

}  // namespace

SimulationTrajectory simulate_closed_loop(const StateSpaceModel& model, const SaturationSpec& sat,
                                          const RegulatorCoefficients& coeffs, const SignalSpec& signals,
                                          const Vec& x0, const SimulationConfig& cfg) {
  cfg.validate(signals);
  signals.validate();
  if (!signals.is_real()) throw InvalidArgument("simulation: signal coefficients must be real");
  if (!sat.real_centers()) throw InvalidArgument("simulation: saturation centers must be real");
  if (x0.size() != model.states()) throw DimensionMismatch("simulation: initial state has wrong dimension");
  if (sat.dim() != model.inputs() || coeffs.dim() != model.inputs() || signals.output_dim() != model.inputs() ||
      signals.disturbance_dim() != model.disturbances()) {
    throw DimensionMismatch("simulation: model, saturation, coefficients and signals disagree on dimensions");
  }

  const double h = cfg.dt;
  const std::size_t steps = cfg.steps();
  const int stride = cfg.effective_stride();
  const bool midpoint = cfg.scheme == Scheme::ExponentialMidpoint;
  const Mat gram = model.has_gram() ? model.gram() : Mat();
  const Mat* gram_ptr = model.has_gram() ? &gram : nullptr;

  const ExponentialOperators full = exponential_operators(model.A(), h, cfg.exec);
  ExponentialOperators half;
  if (midpoint) half = exponential_operators(model.A(), 0.5 * h, cfg.exec);

  ClosedLoopRhs rhs{model, sat, coeffs, signals, cfg.kappa, cfg.bypass_saturation};
  SimulationTrajectory traj;
  const std::size_t expected = steps / static_cast<std::size_t>(stride) + 2;
  traj.times.reserve(expected);

  auto record = [&](double t, const Vec& x, const ClosedLoopRhs::Sample& s) {
    traj.times.push_back(t);
    if (cfg.store_states) traj.states.push_back(x);
    traj.errors.push_back(s.y - s.yref);
    traj.outputs.push_back(s.y);
    traj.references.push_back(s.yref);
    traj.controls.push_back(s.u);
    traj.saturated_controls.push_back(s.phi_u);
    traj.feedforward.push_back(s.ureg);
    traj.xnorm.push_back(xnorm_of(x, gram_ptr));
    traj.sat_active.push_back(s.active ? 1 : 0);
  };

  Vec x = x0;
  Vec next(x.size()), stage(x.size()), diff(x.size());
  ClosedLoopRhs::Sample sample;
  for (std::size_t i = 0;; ++i) {
    const double t = double(i) * h;
    const Vec n0 = rhs(x, t, &sample);
    if (i % static_cast<std::size_t>(stride) == 0 || i == steps) record(t, x, sample);
    if (i == steps) break;
    if (sample.active) ++traj.active_steps;

    full.expA.apply(x, next, cfg.exec);
    full.phi1.apply_add(n0, next, cfg.exec);
    if (midpoint) {
      half.expA.apply(x, stage, cfg.exec);
      half.phi1.apply_add(n0, stage, cfg.exec);
      diff = rhs(stage, t + 0.5 * h) - n0;
      diff *= 2.0;
      full.phi2.apply_add(diff, next, cfg.exec);
    }
    if (!next.allFinite()) {
      std::ostringstream msg;
      msg << "simulation: non-finite state at step " << (i + 1) << " (t = " << (t + h) << ")";
      throw NumericalBlowup(msg.str());
    }
    x.swap(next);
  }
  traj.final_state = x;
  traj.steps = steps;
  return traj;
}

double windowed_error_norm(const SimulationTrajectory& traj, double t0, double t1) {
  const double tol = 1e-9 * std::max(1.0, std::abs(t1));
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
    const double a = traj.times[i], b = traj.times[i + 1];
    if (a < t0 - tol || b > t1 + tol) continue;
    acc += 0.5 * (b - a) * (traj.errors[i].squaredNorm() + traj.errors[i + 1].squaredNorm());
  }
  return std::sqrt(acc);
}

TrackingMetrics tracking_error_metrics(const SimulationTrajectory& traj) {
  if (traj.size() == 0) throw InvalidArgument("tracking_error_metrics: empty trajectory");
  TrackingMetrics m;
  const double t_end = traj.times.back();
  for (int k = 0; double(k + 1) <= t_end + 1e-9; ++k) m.window_norms.push_back(windowed_error_norm(traj, k, k + 1));
  m.sup_xnorm = *std::max_element(traj.xnorm.begin(), traj.xnorm.end());
  m.saturation_fraction = traj.steps > 0 ? double(traj.active_steps) / double(traj.steps) : 0.0;
  const std::size_t n = traj.size();
  const std::size_t tail = std::max<std::size_t>(1, n / 10);
  double acc = 0.0;
  for (std::size_t i = n - tail; i < n; ++i) acc += (traj.saturated_controls[i] - traj.feedforward[i]).norm();
  m.tail_mismatch = acc / double(tail);
  return m;
}

ConvergenceReport convergence_study(const StateSpaceModel& model, const SaturationSpec& sat,
                                    const RegulatorCoefficients& coeffs, const SignalSpec& signals,
                                    const Vec& x0, const SimulationConfig& cfg, const std::vector<double>& dts) {
  if (dts.size() < 3) throw InvalidArgument("convergence_study: need at least three step sizes");
  for (std::size_t i = 1; i < dts.size(); ++i) {
    if (std::abs(dts[i - 1] - 2.0 * dts[i]) > 1e-12 * dts[i - 1]) {
      throw InvalidArgument("convergence_study: each step size must be half the previous one");
    }
  }
  std::vector<Vec> finals;
  for (double dt : dts) {
    SimulationConfig c = cfg;
    c.dt = dt;
    c.record_stride = static_cast<int>(c.steps());
    c.store_states = false;
    finals.push_back(simulate_closed_loop(model, sat, coeffs, signals, x0, c).final_state);
  }
  ConvergenceReport r;
  r.dts = dts;
  for (std::size_t i = 0; i + 1 < finals.size(); ++i) r.errors.push_back((finals[i] - finals.back()).norm());
  // successive differences; free of the bias of comparing against the finest run
  std::vector<double> diffs;
  for (std::size_t i = 0; i + 1 < finals.size(); ++i) diffs.push_back((finals[i] - finals[i + 1]).norm());
  for (std::size_t i = 0; i + 1 < diffs.size(); ++i) {
    r.orders.push_back(diffs[i + 1] > 0.0 ? std::log2(diffs[i] / diffs[i + 1]) : 0.0);
  }
  r.observed_order = r.orders.empty() ? 0.0 : r.orders.back();
  return r;
}

void write_trajectory_csv(std::ostream& out, const SimulationTrajectory& traj) {
  const Eigen::Index ny = traj.size() ? traj.outputs.front().size() : 0;
  out << 't';
  for (const char* name : {"y", "yref", "e", "u", "phi_u"}) {
    for (Eigen::Index j = 1; j <= ny; ++j) out << ',' << name << '_' << j;
  }
  out << ",xnorm,sat_active\n";
  char buf[40];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, ",%.17g", v);
    out << buf;
  };
  for (std::size_t i = 0; i < traj.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", traj.times[i]);
    out << buf;
    for (const auto* series : {&traj.outputs, &traj.references, &traj.errors, &traj.controls,
                               &traj.saturated_controls}) {
      for (Eigen::Index j = 0; j < ny; ++j) put((*series)[i][j]);
    }
    put(traj.xnorm[i]);
    out << ',' << int(traj.sat_active[i]) << '\n';
  }
}

}  // namespace satreg
