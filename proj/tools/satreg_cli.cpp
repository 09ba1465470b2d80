// satreg: command-line driver for the saturated output regulation library.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "satreg/config.hpp"
#include "satreg/experiment.hpp"
#include "satreg/verify.hpp"

namespace fs = std::filesystem;
using namespace satreg;

namespace {

enum Exit : int { kOk = 0, kFailure = 1, kConfigError = 2, kGateFailure = 3, kMarginWarning = 4 };

struct Options {
  std::string config;
  std::string out;
  bool strict = false;
  std::vector<std::string> sweeps;
  std::vector<std::string> lambdas;
  std::string suite = "all";
  int threads = 0;
  bool corrupt_pi = false;
};

using Command = int (*)(const ExperimentConfig&, const Options&, std::ostream&, std::ostream&);

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string fmt(cplx z) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g%+.10gi", z.real(), z.imag());
  return buf;
}

fs::path output_dir(const ExperimentConfig& cfg) {
  fs::path p(cfg.output_dir);
  if (p.is_relative()) p = fs::path(cfg.base_dir) / p;
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot write '" + path.string() + "'");
  f << text;
}

double parse_signed_frequency(std::string s) {
  s.erase(std::remove_if(s.begin(), s.end(), ::isspace), s.end());
  double sign = 1.0;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    sign = s[0] == '-' ? -1.0 : 1.0;
    s.erase(0, 1);
  }
  return sign * parse_frequency(s);
}

// "RE,IM" where each part may use pi, e.g. "0,3pi" or "-1,0".
cplx parse_lambda(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) return {parse_signed_frequency(text), 0.0};
  return {parse_signed_frequency(text.substr(0, comma)), parse_signed_frequency(text.substr(comma + 1))};
}

void margin_warnings(const BuiltExperiment& ex, double margin, std::ostream& err) {
  if (margin <= 0.0) {
    err << "warning: linear_regime_margin = " << fmt(margin)
        << " <= 0; u_reg leaves the saturation balls, boundedness and tracking are not guaranteed\n";
  }
  if (ex.kappa > 0.0 && !ex.saturation.centers_strictly_inside()) {
    err << "warning: some saturation center lies on or outside its ball; the kappa > 0 stability argument does not apply\n";
  }
  if (ex.kappa == 0.0) err << "note: kappa = 0, no error feedback; requires an exponentially stable model\n";
}

int cmd_transfer(const ExperimentConfig& cfg, const Options& opt, std::ostream& out, std::ostream& err) {
  const BuiltExperiment ex = build_experiment(cfg);
  std::vector<cplx> lambdas = cfg.lambdas;
  for (const auto& s : opt.lambdas) lambdas.push_back(parse_lambda(s));
  if (lambdas.empty()) throw InvalidArgument("transfer: no lambda given (use --lambda or 'lambdas' in the config)");
  const auto values = run_transfer(ex, lambdas);
  int code = kOk;
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    out << "lambda = " << fmt(lambdas[k]) << "  kappa = " << fmt(cfg.kappa) << '\n';
    if (!values[k].value) {
      try {
        std::rethrow_exception(values[k].error);
      } catch (const GateFailure& e) {
        out << "  gate failure: " << e.what() << '\n';
        code = kGateFailure;
      }
      continue;
    }
    const auto& v = *values[k].value;
    for (Eigen::Index i = 0; i < v.Pc.rows(); ++i) {
      out << "  Pc[" << i + 1 << "] =";
      for (Eigen::Index j = 0; j < v.Pc.cols(); ++j) out << ' ' << fmt(v.Pc(i, j));
      if (v.Pd.cols() > 0) {
        out << "   Pd[" << i + 1 << "] =";
        for (Eigen::Index j = 0; j < v.Pd.cols(); ++j) out << ' ' << fmt(v.Pd(i, j));
      }
      out << '\n';
    }
    out << "  sigma_min(lambda - A^kappa) = " << fmt(v.resolvent_sigma_min) << '\n';
  }
  std::ostringstream csv;
  write_transfer_csv(csv, lambdas, values);
  const fs::path dir = output_dir(cfg);
  write_file(dir / "transfer.csv", csv.str());
  out << "wrote " << (dir / "transfer.csv").string() << '\n';
  (void)err;
  return code;
}

int cmd_regulate(const ExperimentConfig& cfg, const Options& opt, std::ostream& out, std::ostream& err) {
  const BuiltExperiment ex = build_experiment(cfg);
  const RegulateResult r = run_regulate(ex);
  out << "linear_regime_margin = " << fmt(r.margin) << (r.grid.commensurate ? " (one common period, " : " (")
      << r.grid.samples << " samples over [0, " << fmt(r.grid.t_end) << "])\n";
  margin_warnings(ex, r.margin, err);
  if (r.margin <= 0.0 && opt.strict) {
    err << "error: --strict and margin <= 0, nothing written\n";
    return kMarginWarning;
  }
  std::ostringstream csv;
  write_coefficients_csv(csv, r.coeffs);
  const fs::path dir = output_dir(cfg);
  write_file(dir / "coefficients.csv", csv.str());
  out << "wrote " << (dir / "coefficients.csv").string() << '\n';
  return r.margin <= 0.0 ? kMarginWarning : kOk;
}

int cmd_simulate(const ExperimentConfig& cfg, const Options& opt, std::ostream& out, std::ostream& err) {
  const BuiltExperiment ex = build_experiment(cfg);
  const RegulateResult reg = run_regulate(ex);
  margin_warnings(ex, reg.margin, err);
  if (reg.margin <= 0.0 && opt.strict) {
    err << "error: --strict and margin <= 0, not simulating\n";
    return kMarginWarning;
  }
  const SimulateResult r = run_simulate(cfg, ex, reg);
  const fs::path dir = output_dir(cfg);
  std::ostringstream traj, coeffs;
  write_trajectory_csv(traj, r.traj);
  write_coefficients_csv(coeffs, r.reg.coeffs);
  write_file(dir / "trajectory.csv", traj.str());
  write_file(dir / "coefficients.csv", coeffs.str());
  write_file(dir / "metrics.json", metrics_json(cfg, r));

  const auto& w = r.metrics.window_norms;
  out << "linear_regime_margin = " << fmt(r.reg.margin) << '\n';
  if (!w.empty()) {
    out << "error norm on [0,1] = " << fmt(w.front()) << ", on [" << w.size() - 1 << "," << w.size()
        << "] = " << fmt(w.back()) << ", ratio = " << fmt(r.error_ratio) << '\n';
  }
  out << "sup |x| = " << fmt(r.metrics.sup_xnorm) << " (bound " << fmt(r.state_bound) << ")\n";
  out << "saturation active on " << fmt(100.0 * r.metrics.saturation_fraction) << "% of steps\n";
  out << "wrote " << (dir / "trajectory.csv").string() << ", metrics.json, coefficients.csv\n";
  return r.reg.margin <= 0.0 ? kMarginWarning : kOk;
}

int cmd_measure(const ExperimentConfig& cfg, const Options&, std::ostream& out, std::ostream&) {
  const BuiltExperiment ex = build_experiment(cfg);
  const MeasureResult r = run_measure_disturbance(ex);
  const fs::path dir = output_dir(cfg);
  write_file(dir / "measured_signals.json", serialize_signals(r.measured));
  double scale = 1.0;
  for (const auto& h : ex.signals.harmonics) scale = std::max({scale, h.c.norm(), h.d.norm()});
  scale = std::max(scale, ex.signals.c0.norm());
  const double limit = 1e-9 * scale;
  const bool ok = r.identity_error <= limit;
  out << (ok ? "PASS" : "FAIL") << "  max |u_reg + kappa y_ref| over 1000 samples = " << fmt(r.identity_error)
      << " (limit " << fmt(limit) << ")\n";
  out << "wrote " << (dir / "measured_signals.json").string() << '\n';
  return ok ? kOk : kFailure;
}

int run_verify_command(const Options& opt) {
  VerifyOptions vo;
  vo.corrupt_pi = opt.corrupt_pi;
  const auto results = run_verify(opt.suite, vo);
  std::size_t failed = 0;
  for (const auto& r : results) {
    print_check(std::cout, r);
    failed += r.passed ? 0 : 1;
  }
  std::cout << (failed ? "FAILED " : "OK ") << results.size() - failed << "/" << results.size() << " checks passed\n";
  if (!opt.out.empty()) {
    fs::create_directories(opt.out);
    std::ostringstream s;
    for (const auto& r : results) print_check(s, r);
    write_file(fs::path(opt.out) / "verify.tsv", s.str());
  }
  return failed ? kFailure : kOk;
}

int classify(const std::exception_ptr& e, std::ostream& err) {
  try {
    std::rethrow_exception(e);
  } catch (const GateFailure& ex) {
    err << "gate failure: " << ex.what() << '\n';
    return kGateFailure;
  } catch (const InvalidArgument& ex) {
    err << "config error: " << ex.what() << '\n';
    return kConfigError;
  } catch (const DimensionMismatch& ex) {
    err << "config error: " << ex.what() << '\n';
    return kConfigError;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kFailure;
  }
}

struct Run {
  ExperimentConfig cfg;
  std::string label;
};

std::vector<Run> expand_sweeps(const ExperimentConfig& base, const std::vector<std::string>& sweeps) {
  std::vector<Run> runs{{base, ""}};
  for (const auto& sw : sweeps) {
    const auto eq = sw.find('=');
    if (eq == std::string::npos || eq == 0) throw InvalidArgument("--sweep expects key=v1,v2,...");
    const std::string key = sw.substr(0, eq);
    std::vector<std::string> values;
    std::stringstream ss(sw.substr(eq + 1));
    for (std::string v; std::getline(ss, v, ',');) values.push_back(v);
    if (values.empty()) throw InvalidArgument("--sweep " + key + " has no values");
    std::vector<Run> next;
    for (const auto& r : runs) {
      for (const auto& v : values) {
        Run n{with_override(r.cfg, key, v), r.label + (r.label.empty() ? "" : "_") + key + "=" + v};
        next.push_back(std::move(n));
      }
    }
    runs = std::move(next);
  }
  if (!sweeps.empty()) {
    for (auto& r : runs) r.cfg.output_dir = (fs::path(r.cfg.output_dir) / r.label).string();
  }
  return runs;
}

int run_config_command(Command cmd, const Options& opt) {
  std::vector<Run> runs;
  try {
    ExperimentConfig cfg = load_config_file(opt.config);
    if (!opt.out.empty()) {
      cfg.output_dir = fs::absolute(opt.out).string();
    }
    runs = expand_sweeps(cfg, opt.sweeps);
  } catch (...) {
    return classify(std::current_exception(), std::cerr);
  }
  std::vector<std::string> outs(runs.size()), errs(runs.size());
  std::vector<int> codes(runs.size(), kOk);
  const auto n = static_cast<std::ptrdiff_t>(runs.size());
#pragma omp parallel for schedule(dynamic) if (n > 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    std::ostringstream o, e;
    try {
      codes[i] = cmd(runs[i].cfg, opt, o, e);
    } catch (...) {
      codes[i] = classify(std::current_exception(), e);
    }
    outs[i] = o.str();
    errs[i] = e.str();
  }
  int code = kOk;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (!runs[i].label.empty()) std::cout << "== " << runs[i].label << " (exit " << codes[i] << ")\n";
    std::cout << outs[i];
    std::cerr << errs[i];
    code = std::max(code, codes[i]);
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Saturated output regulation for passive state-space models"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--threads", opt.threads, "OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory (overrides output_dir)");
    sub->add_flag("--strict", opt.strict, "treat margin <= 0 as a hard failure");
    sub->add_option("--sweep", opt.sweeps, "run for key=v1,v2,... (dotted config key), in parallel");
  };
  auto* transfer = app.add_subcommand("transfer", "transfer values P_c^kappa, P_d^kappa at given lambdas");
  add_common(transfer);
  transfer->add_option("--lambda", opt.lambdas, "evaluation point RE,IM (pi allowed, e.g. 0,3pi)");
  auto* regulate = app.add_subcommand("regulate", "feedforward coefficients and linear-regime margin");
  add_common(regulate);
  auto* simulate = app.add_subcommand("simulate", "closed-loop simulation with trajectory and metrics");
  add_common(simulate);
  auto* measure = app.add_subcommand("measure-disturbance", "reference that cancels the configured disturbance");
  add_common(measure);
  auto* verify = app.add_subcommand("verify", "run property suites");
  verify->add_option("--suite", opt.suite, "all or one of: saturation, signals, state_space, regulator, pde, simulator");
  verify->add_option("--out", opt.out, "also write verify.tsv here");
  verify->add_flag("--corrupt-pi", opt.corrupt_pi, "fault injection: perturb Pi before the residual checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }
  if (opt.threads > 0) set_threads(opt.threads);

  if (*verify) {
    try {
      return run_verify_command(opt);
    } catch (...) {
      return classify(std::current_exception(), std::cerr);
    }
  }
  if (*transfer) return run_config_command(cmd_transfer, opt);
  if (*regulate) return run_config_command(cmd_regulate, opt);
  if (*simulate) return run_config_command(cmd_simulate, opt);
  return run_config_command(cmd_measure, opt);
}
