#include "satreg/verify.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <random>

#include "satreg/pde_models.hpp"
#include "satreg/regulator.hpp"
#include "satreg/saturation.hpp"
#include "satreg/signal_model.hpp"
#include "satreg/simulator.hpp"
#include "satreg/state_space.hpp"

namespace satreg {

namespace {

using Rng = std::mt19937_64;

struct Suite {
  std::string name;
  std::vector<CheckResult> out;
  void check_le(const std::string& check, double value, double limit, const std::string& detail = "") {
    out.push_back({name, check, value <= limit, value, limit, detail});
  }
  void check_lt(const std::string& check, double value, double limit, const std::string& detail = "") {
    out.push_back({name, check, value < limit, value, limit, detail});
  }
  void check_true(const std::string& check, bool ok, const std::string& detail = "") {
    out.push_back({name, check, ok, ok ? 1.0 : 0.0, 1.0, detail});
  }
};

CVec random_cvec(Rng& rng, Eigen::Index n, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  CVec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = cplx(g(rng), g(rng));
  return v;
}

Mat random_mat(Rng& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = g(rng);
  return m;
}

double rel_diff(const CMat& a, const CMat& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

// Sample times spread over the slowest period.
std::vector<double> sample_times(const std::vector<double>& omegas, int count) {
  double span = 1.0;
  for (double w : omegas) span = std::max(span, 2.0 * M_PI / w);
  std::vector<double> t(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) t[i] = span * i / count;
  return t;
}

struct RegCase {
  std::string name;
  StateSpaceModel model;
  double kappa;
  SignalSpec signals;
};

std::vector<RegCase> regulator_cases() {
  SignalSpec toy = SignalSpec::zeros(1, 1, {1.0, 2.5});
  toy.a0 = CVec::Constant(1, 0.5);
  toy.c0 = CVec::Constant(1, -0.3);
  toy.harmonics[0].b = CVec::Constant(1, 1.0);
  toy.harmonics[1].a = CVec::Constant(1, 0.7);
  toy.harmonics[1].d = CVec::Constant(1, 0.2);
  return {{"toy", build_toy(-1.0), 1.0, toy},
          {"heat15", build_heat2d({15}), 3.0, heat_paper_signals()},
          {"wave20", build_wave1d({20}), 0.75, wave_paper_signals()}};
}

void saturation_suite(Suite& s, const VerifyOptions& o) {
  Rng rng(o.seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double idem = 0.0, firm = -1e300, lemma = -1e300;
  for (int dim = 1; dim <= 3; ++dim) {
    for (int i = 0; i < 10000; ++i) {
      const double delta0 = 0.5 + 4.5 * uni(rng);
      const CVec r = random_cvec(rng, dim, 0.3 * delta0);
      const SaturationSpec spec({{r, delta0}});
      const CVec v1 = random_cvec(rng, dim, 3.0), v2 = random_cvec(rng, dim, 3.0);
      const CVec p1 = saturate(spec, v1), p2 = saturate(spec, v2);
      idem = std::max(idem, (saturate(spec, p1) - p1).norm());
      firm = std::max(firm, (p2 - p1).squaredNorm() - (p2 - p1).dot(v2 - v1).real());

      // Symmetric channel, u strictly inside by delta.
      const SaturationSpec sym({{CVec::Zero(dim), delta0}});
      const double delta = delta0 * (0.01 + 0.98 * uni(rng));
      CVec u = random_cvec(rng, dim, 1.0);
      u *= (delta0 - delta) * uni(rng) / std::max(u.norm(), 1e-300);
      const CVec e = random_cvec(rng, dim, 5.0 * uni(rng));
      const double kappa = 0.01 + 5.0 * uni(rng);
      const CVec w = u - kappa * e;
      const double lhs = e.dot(saturate(sym, w) - u).real();
      const double rhs = -kappa * delta * e.squaredNorm() / std::max(delta0, w.norm());
      lemma = std::max(lemma, lhs - rhs);
    }
  }
  s.check_le("idempotence", idem, 1e-12);
  s.check_le("firm_nonexpansive", firm, 1e-12, "max |dphi|^2 - Re<dphi, dv>");
  s.check_le("dissipation_inequality", lemma, 1e-12, "max lhs - rhs");
}

void signals_suite(Suite& s, const VerifyOptions& o) {
  Rng rng(o.seed + 1);
  SignalSpec rnd = SignalSpec::zeros(2, 3, {0.7, 2.0, 5.5});
  rnd.a0 = random_cvec(rng, 2, 1.0);
  rnd.c0 = random_cvec(rng, 3, 1.0);
  for (auto& h : rnd.harmonics) {
    h.a = random_cvec(rng, 2, 1.0);
    h.b = random_cvec(rng, 2, 1.0);
    h.c = random_cvec(rng, 3, 1.0);
    h.d = random_cvec(rng, 3, 1.0);
  }
  double worst = 0.0, norm_drift = 0.0;
  for (const SignalSpec& spec : {heat_paper_signals(), wave_paper_signals(), rnd}) {
    const Exosystem exo = build_exosystem(spec);
    const double n0 = exo.v0.norm();
    for (double t : sample_times(spec.omegas(), 200)) {
      const CVec v = exo_state(exo, t).cast<cplx>();
      worst = std::max(worst, (exo.F * v - eval_reference(spec, t)).norm());
      worst = std::max(worst, (exo.E * v - eval_disturbance(spec, t)).norm());
      norm_drift = std::max(norm_drift, std::abs(v.norm() - n0));
    }
  }
  s.check_le("exosystem_matches_signals", worst, 1e-12);
  s.check_le("exo_state_norm_constant", norm_drift, 1e-12);
  const Exosystem wave = build_exosystem(wave_paper_signals());
  s.check_true("zero_block_dropped", !wave.has_constant_block && wave.dim() == 6);
  const Mat skew = wave.A_exo + wave.A_exo.transpose();
  s.check_le("A_exo_skew", skew.norm(), 0.0);
}

void state_space_suite(Suite& s, const VerifyOptions& o) {
  Rng rng(o.seed + 2);
  // Passive: symmetric part of A negative definite, C = B^T.
  const int n = 8;
  const Mat G = random_mat(rng, n, n), K = random_mat(rng, n, n);
  const Mat A = -(G * G.transpose()) - 0.1 * Mat::Identity(n, n) + (K - K.transpose());
  const Mat B = random_mat(rng, n, 2), Bd = random_mat(rng, n, 1);
  const StateSpaceModel model(A, B, Bd, B.transpose());
  const cplx l1(0.3, 1.7), l2(-0.05, -2.2);
  const CMat x = random_cvec(rng, n, 1.0);
  const CMat R1 = resolvent_solve(model, 0.0, l1, x), R2 = resolvent_solve(model, 0.0, l2, x);
  const CMat R12 = resolvent_solve(model, 0.0, l1, resolvent_solve(model, 0.0, l2, x));
  s.check_le("resolvent_identity", rel_diff(R1 - R2, (l2 - l1) * R12), 1e-8);

  const auto heat = build_heat2d({8});
  double cl = 0.0;
  for (cplx l : {cplx(0.0, M_PI), cplx(2.0, -3.0), cplx(0.0, 5 * M_PI)}) {
    const auto open = transfer(heat, l);
    const auto closed = closed_loop_transfer(heat, 3.0, l);
    const CMat I = CMat::Identity(2, 2);
    cl = std::max(cl, rel_diff((I + 3.0 * open.Pc) * closed.Pc, open.Pc));
    cl = std::max(cl, rel_diff((I + 3.0 * open.Pc) * closed.Pd, open.Pd));
    const auto alt = closed_loop_transfer(heat, 3.0, l, ClosedLoopPath::FeedbackIdentity);
    cl = std::max(cl, rel_diff(alt.Pc, closed.Pc));
  }
  s.check_le("closed_loop_identity", cl, 1e-8);

  const auto wave = build_wave1d({20});
  double conj_err = 0.0;
  for (cplx l : {cplx(0.0, M_PI), cplx(0.4, 2.0)}) {
    const auto a = closed_loop_transfer(wave, 0.75, l), b = closed_loop_transfer(wave, 0.75, std::conj(l));
    conj_err = std::max(conj_err, (b.Pc - a.Pc.conjugate()).cwiseAbs().maxCoeff());
    conj_err = std::max(conj_err, (b.Pd - a.Pd.conjugate()).cwiseAbs().maxCoeff());
  }
  s.check_le("conjugate_symmetry", conj_err, 1e-12);

  const auto heat31 = build_heat2d({31});
  const auto wave30 = build_wave1d({30});
  s.check_le("heat31_passive", check_passivity(heat31).worst_eigenvalue, 1e-10);
  s.check_le("wave30_passive", check_passivity(wave30).worst_eigenvalue, 1e-10);
  s.check_lt("heat31_closed_loop_stable", spectral_abscissa(closed_loop_generator(heat31, 3.0)), 0.0);
  s.check_lt("wave30_closed_loop_stable", spectral_abscissa(closed_loop_generator(wave30, 0.75)), 0.0);
  double mono = -1e300;
  for (double k : {0.0, 0.5, 3.0}) {
    mono = std::max(mono, spectral_abscissa(closed_loop_generator(model, k)) - spectral_abscissa(model.A()) - 1e-8);
  }
  s.check_le("feedback_does_not_destabilize", mono, 0.0);
}

void regulator_suite(Suite& s, const VerifyOptions& o) {
  for (const auto& c : regulator_cases()) {
    const Exosystem exo = build_exosystem(c.signals);
    const auto coeffs = compute_coefficients(c.model, c.kappa, c.signals, o.exec);
    RegulatorSolution sol = solve_regulator_equations(c.model, c.kappa, exo, o.exec);

    double lemma = 0.0, imag = 0.0;
    for (double t : sample_times(c.signals.omegas(), 100)) {
      const CVec u = eval_ureg_complex(coeffs, t);
      lemma = std::max(lemma, (sol.Gamma * exo_state(exo, t).cast<cplx>() - u).norm());
      imag = std::max(imag, u.imag().norm());
    }
    s.check_le(c.name + ".gamma_v_equals_ureg", lemma, 1e-8);
    s.check_le(c.name + ".ureg_real", imag, 1e-10);

    if (o.corrupt_pi) sol.Pi(0, 0) += 1.0;
    const auto [r1, r2] = regulator_residual(c.model, c.kappa, exo, sol);
    const double lim = 1e-8 * (1.0 + sol.Pi.norm());
    s.check_le(c.name + ".residual_dynamics", r1, lim);
    s.check_le(c.name + ".residual_output", r2, lim);

    // u_reg does not depend on kappa.
    const auto other = compute_coefficients(c.model, 2.0 * c.kappa, c.signals, o.exec);
    double inv = 0.0;
    for (double t : sample_times(c.signals.omegas(), 50)) {
      inv = std::max(inv, (eval_ureg(other, t) - eval_ureg(coeffs, t)).norm() /
                              std::max(1.0, eval_ureg(coeffs, t).norm()));
    }
    s.check_le(c.name + ".ureg_kappa_invariant", inv, 1e-8);
  }

  // Open-loop shortcut for f_k on the heat model (i w in rho(A) for w != 0).
  const auto heat = build_heat2d({15});
  const SignalSpec sig = heat_paper_signals();
  const auto coeffs = compute_coefficients(heat, 3.0, sig, o.exec);
  double shortcut = 0.0;
  const cplx I(0.0, 1.0);
  for (std::size_t k = 0; k < sig.harmonics.size(); ++k) {
    const auto& h = sig.harmonics[k];
    const auto tv = transfer(heat, cplx(0.0, h.omega));
    const auto lu = tv.Pc.partialPivLu();
    const CVec f = lu.solve(CVec(h.a - I * h.b)) - lu.solve(CVec(tv.Pd * (h.c - I * h.d)));
    shortcut = std::max(shortcut, (f - coeffs.f[k]).norm() / std::max(1.0, f.norm()));
  }
  s.check_le("heat15.open_loop_shortcut", shortcut, 1e-8);

  double measure = 0.0;
  for (const auto& c : regulator_cases()) {
    if (c.name == "wave20") continue;
    SignalSpec dist = c.signals;
    dist.a0.setZero();
    for (auto& h : dist.harmonics) {
      h.a.setZero();
      h.b.setZero();
    }
    SignalSpec ref = measured_reference_from_disturbance(c.model, c.kappa, dist, o.exec);
    ref.c0 = dist.c0;
    for (std::size_t k = 0; k < ref.harmonics.size(); ++k) {
      ref.harmonics[k].c = dist.harmonics[k].c;
      ref.harmonics[k].d = dist.harmonics[k].d;
    }
    const auto cf = compute_coefficients(c.model, c.kappa, ref, o.exec);
    for (double t : sample_times(ref.omegas(), 1000)) {
      measure = std::max(measure, (eval_ureg_complex(cf, t) + c.kappa * eval_reference(ref, t)).norm());
    }
  }
  s.check_le("disturbance_measurement_identity", measure, 1e-9);

  // Margin tends to the center clearance as the signals shrink.
  const SaturationSpec sat = SaturationSpec::scalar({-4.5, 2.5}, {7.0, 12.5});
  double prev = -1e300;
  bool monotone = true;
  for (double scale : {1.0, 0.5, 0.25, 0.1, 0.01, 0.0}) {
    const double m = linear_regime_margin(coeffs.scaled(scale), sat, o.exec);
    monotone = monotone && m >= prev - 1e-12;
    prev = m;
  }
  s.check_true("margin_monotone_under_scaling", monotone);
  s.check_le("margin_limit_is_center_clearance", std::abs(prev - sat.center_clearance()), 1e-12);
}

void pde_suite(Suite& s, const VerifyOptions& o) {
  const auto w40 = build_wave1d({40}), w80 = build_wave1d({80});
  double worst40 = 0.0;
  bool refines = true;
  for (double w : {M_PI, 3 * M_PI, 5 * M_PI}) {
    const cplx exact = wave_transfer_exact(w, 0.75).first;
    const double e40 = std::abs(closed_loop_transfer(w40, 0.75, cplx(0, w)).Pc(0, 0) - exact) / std::abs(exact);
    const double e80 = std::abs(closed_loop_transfer(w80, 0.75, cplx(0, w)).Pc(0, 0) - exact) / std::abs(exact);
    worst40 = std::max(worst40, e40);
    refines = refines && (e80 < e40 || (e80 <= 1e-12 && e40 <= 1e-12));
  }
  s.check_le("wave_oracle_N40", worst40, 0.05);
  s.check_true("wave_oracle_refines", refines);

  bool open_rejected = false;
  try {
    transfer(w40, cplx(0.0, 5 * M_PI));
  } catch (const NearSingularResolvent&) {
    open_rejected = true;
  }
  s.check_true("wave_open_loop_resonance_rejected", open_rejected);

  const auto heat = build_heat2d({15});
  bool heat_zero_rejected = false;
  try {
    transfer(heat, 0.0);
  } catch (const NearSingularResolvent&) {
    heat_zero_rejected = true;
  }
  s.check_true("heat_open_loop_zero_rejected", heat_zero_rejected);
  const auto cl0 = closed_loop_transfer(heat, 3.0, 0.0);
  s.check_true("heat_closed_loop_zero_ok", cl0.Pc.allFinite());

  const auto series = heat_transfer_series(cplx(0.0, M_PI), 3.0, 15);
  const auto direct = closed_loop_transfer(heat, 3.0, cplx(0.0, M_PI));
  s.check_le("heat_series_matches_model", rel_diff(series.Pc, direct.Pc), 1e-10);

  double d1 = (heat_transfer_series(cplx(0, M_PI), 3.0, 20).Pc - heat_transfer_series(cplx(0, M_PI), 3.0, 10).Pc).norm();
  double d2 = (heat_transfer_series(cplx(0, M_PI), 3.0, 40).Pc - heat_transfer_series(cplx(0, M_PI), 3.0, 20).Pc).norm();
  s.check_lt("heat_series_converges", d2, d1);
  (void)o;
}

void simulator_suite(Suite& s, const VerifyOptions& o) {
  const auto toy = build_toy(-1.0);
  SignalSpec sig = SignalSpec::zeros(1, 1, {1.0, 3.0});
  sig.a0 = CVec::Constant(1, 0.2);
  sig.harmonics[0].b = CVec::Constant(1, 0.5);
  sig.harmonics[1].c = CVec::Constant(1, 0.3);
  const SaturationSpec sat = SaturationSpec::scalar({0.0}, {5.0});
  const double kappa = 1.0;
  const auto coeffs = compute_coefficients(toy, kappa, sig, o.exec);
  const Exosystem exo = build_exosystem(sig);
  const auto sol = solve_regulator_equations(toy, kappa, exo, o.exec);
  const Vec x0 = (sol.Pi * exo.v0.cast<cplx>()).real();

  SimulationConfig cfg;
  cfg.t_end = 10.0;
  cfg.dt = 1e-3;
  cfg.kappa = kappa;
  cfg.exec = o.exec;
  const auto traj = simulate_closed_loop(toy, sat, coeffs, sig, x0, cfg);
  double sup_e = 0.0;
  for (const auto& e : traj.errors) sup_e = std::max(sup_e, e.norm());
  s.check_le("toy_steady_state_invariance", sup_e, 1e-6);

  SimulationConfig lin = cfg;
  lin.bypass_saturation = true;
  const auto ref = simulate_closed_loop(toy, sat, coeffs, sig, Vec::Constant(1, 1.0), lin);
  const auto sat_run = simulate_closed_loop(toy, sat, coeffs, sig, Vec::Constant(1, 1.0), cfg);
  s.check_true("no_saturation_activity", sat_run.active_steps == 0);
  double gap = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) gap = std::max(gap, (ref.outputs[i] - sat_run.outputs[i]).norm());
  s.check_le("inactive_saturation_matches_linear", gap, 1e-10);

  SimulationConfig conv = cfg;
  conv.t_end = 2.0;
  const auto study = convergence_study(toy, sat, coeffs, sig, Vec::Constant(1, 1.0), conv, {0.02, 0.01, 0.005, 0.0025});
  s.check_le("exp_midpoint_order", std::abs(study.observed_order - 2.0), 0.2);
}

}  // namespace

const std::vector<std::string>& verify_suite_names() {
  static const std::vector<std::string> names{"saturation", "signals", "state_space", "regulator", "pde", "simulator"};
  return names;
}

std::vector<CheckResult> run_verify(const std::string& suite, const VerifyOptions& opts) {
  static const std::vector<std::pair<std::string, std::function<void(Suite&, const VerifyOptions&)>>> table{
      {"saturation", saturation_suite}, {"signals", signals_suite}, {"state_space", state_space_suite},
      {"regulator", regulator_suite},   {"pde", pde_suite},         {"simulator", simulator_suite}};
  std::vector<CheckResult> all;
  bool found = false;
  for (const auto& [name, fn] : table) {
    if (suite != "all" && suite != name) continue;
    found = true;
    Suite s{name, {}};
    try {
      fn(s, opts);
    } catch (const std::exception& e) {
      s.out.push_back({name, "suite_completed", false, 0.0, 0.0, e.what()});
    }
    all.insert(all.end(), s.out.begin(), s.out.end());
  }
  if (!found) throw InvalidArgument("unknown verify suite '" + suite + "'");
  return all;
}

void print_check(std::ostream& out, const CheckResult& r) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "\tvalue=%.6e\tlimit=%.6e", r.value, r.limit);
  out << (r.passed ? "PASS" : "FAIL") << '\t' << r.suite << '\t' << r.name << buf;
  if (!r.detail.empty()) out << '\t' << r.detail;
  out << '\n';
}

}  // namespace satreg
