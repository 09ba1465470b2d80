#include "satreg/regulator.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include <Eigen/LU>
#include <Eigen/SVD>

namespace satreg {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

double condition_number(const CMat& m) {
  Eigen::JacobiSVD<CMat> svd(m);
  const auto& s = svd.singularValues();
  const double smin = s[s.size() - 1];
  if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
  return s[0] / smin;
}

// Gamma phi = P_c^{-1} ((I - kappa P_c) F phi - P_d E phi).
CVec feedforward_amplitude(const ExoFrequencyResponse& r, double kappa, const CVec& Fphi, const CVec& Ephi) {
  const auto m = r.Pc.rows();
  CVec rhs = (CMat::Identity(m, m) - kappa * r.Pc) * Fphi;
  if (Ephi.size() > 0) rhs -= r.Pd * Ephi;
  return r.Pc.partialPivLu().solve(rhs);
}

// Unitary eigenvector basis of A_exo: phi_0 = e_0, phi_k^+- = (e_o +- i e_{o+1})/sqrt2.
CMat exo_eigenbasis(const Exosystem& exo) {
  const auto n = exo.dim();
  CMat V = CMat::Zero(n, n);
  if (exo.has_constant_block) V(0, 0) = 1.0;
  for (std::size_t k = 0; k < exo.omegas.size(); ++k) {
    const auto o = exo.block_offset(k);
    V(o, o) = kInvSqrt2;
    V(o + 1, o) = cplx(0.0, kInvSqrt2);
    V(o, o + 1) = kInvSqrt2;
    V(o + 1, o + 1) = cplx(0.0, -kInvSqrt2);
  }
  return V;
}

void check_model_signals(const StateSpaceModel& model, Eigen::Index nu, Eigen::Index nd) {
  if (nu != model.inputs()) {
    throw DimensionMismatch("signal output dimension " + std::to_string(nu) + " does not match model inputs " +
                            std::to_string(model.inputs()));
  }
  if (nd != model.disturbances()) {
    throw DimensionMismatch("signal disturbance dimension " + std::to_string(nd) +
                            " does not match model disturbances " + std::to_string(model.disturbances()));
  }
}

// Rational approximation p/q of x with q <= max_den, or {0, 0} if none
// within tol.
std::pair<long, long> rational_approx(double x, long max_den, double tol) {
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(r);
    const long ai = static_cast<long>(a);
    const long p2 = ai * p1 + p0, q2 = ai * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    if (std::abs(x - double(p1) / double(q1)) <= tol * std::max(1.0, std::abs(x))) return {p1, q1};
    const double frac = r - a;
    if (frac < 1e-15) break;
    r = 1.0 / frac;
  }
  return {0, 0};
}

}  // namespace

RegulatorCoefficients RegulatorCoefficients::scaled(double s) const {
  RegulatorCoefficients out = *this;
  out.f0 *= s;
  for (auto& v : out.f) v *= s;
  for (auto& v : out.g) v *= s;
  return out;
}

std::vector<ExoFrequencyResponse> exo_frequency_response(const StateSpaceModel& model, double kappa,
                                                         const std::vector<double>& omegas, bool include_zero,
                                                         Exec exec) {
  std::vector<cplx> lambdas;
  if (include_zero) lambdas.emplace_back(0.0, 0.0);
  for (double w : omegas) lambdas.emplace_back(0.0, w);
  const auto sweep = transfer_sweep(model, kappa, lambdas, exec);

  std::vector<ExoFrequencyResponse> out;
  std::size_t i = 0;
  if (include_zero) {
    const auto& e = sweep[i++];
    if (e.error) {
      try {
        std::rethrow_exception(e.error);
      } catch (const NearSingularResolvent& ex) {
        throw ResolventFailure(0.0, std::string("0 is not in the resolvent set of A^kappa (") + ex.what() + ")");
      }
    }
    const double cond = condition_number(e.value->Pc);
    if (!(cond < kTransmissionConditionLimit)) {
      throw ResolventFailure(0.0, "P_c^kappa(0) is not invertible (condition " + std::to_string(cond) + ")");
    }
    out.push_back({cplx(0.0, 0.0), 0.0, e.value->Pc, e.value->Pd});
  }
  for (double w : omegas) {
    const auto& e = sweep[i++];
    if (e.error) std::rethrow_exception(e.error);
    const double cond = condition_number(e.value->Pc);
    if (!(cond < kTransmissionConditionLimit)) throw TransmissionZero(w, cond);
    out.push_back({cplx(0.0, w), w, e.value->Pc, e.value->Pd});
    out.push_back({cplx(0.0, -w), w, e.value->Pc.conjugate(), e.value->Pd.conjugate()});
  }
  return out;
}

RegulatorCoefficients compute_coefficients(const StateSpaceModel& model, double kappa, const SignalSpec& spec,
                                           Exec exec) {
  spec.validate();
  check_model_signals(model, spec.output_dim(), spec.disturbance_dim());
  const bool constant = spec.has_constant_part();
  const auto resp = exo_frequency_response(model, kappa, spec.omegas(), constant, exec);
  const cplx I(0.0, 1.0);

  RegulatorCoefficients rc;
  rc.kappa = kappa;
  rc.omegas = spec.omegas();
  rc.f0 = CVec::Zero(spec.output_dim());
  std::size_t i = 0;
  if (constant) rc.f0 = feedforward_amplitude(resp[i++], kappa, spec.a0, spec.c0);
  for (const auto& h : spec.harmonics) {
    rc.f.push_back(feedforward_amplitude(resp[i++], kappa, h.a - I * h.b, h.c - I * h.d));
    rc.g.push_back(feedforward_amplitude(resp[i++], kappa, h.a + I * h.b, h.c + I * h.d));
  }
  return rc;
}

CVec eval_ureg_complex(const RegulatorCoefficients& coeffs, double t) {
  const cplx I(0.0, 1.0);
  CVec u = coeffs.f0;
  for (std::size_t k = 0; k < coeffs.omegas.size(); ++k) {
    const double c = std::cos(coeffs.omegas[k] * t), s = std::sin(coeffs.omegas[k] * t);
    u += 0.5 * ((coeffs.f[k] + coeffs.g[k]) * c + I * (coeffs.f[k] - coeffs.g[k]) * s);
  }
  return u;
}

Vec eval_ureg(const RegulatorCoefficients& coeffs, double t) { return eval_ureg_complex(coeffs, t).real(); }

RegulatorSolution solve_regulator_equations(const StateSpaceModel& model, double kappa, const Exosystem& exo,
                                            Exec exec) {
  check_model_signals(model, exo.F.rows(), exo.E.rows());
  const auto resp = exo_frequency_response(model, kappa, exo.omegas, exo.has_constant_block, exec);
  const CMat V = exo_eigenbasis(exo);
  const auto nv = exo.dim();
  CMat gamma_eig(model.inputs(), nv);
  for (Eigen::Index j = 0; j < nv; ++j) {
    gamma_eig.col(j) = feedforward_amplitude(resp[static_cast<std::size_t>(j)], kappa, exo.F * V.col(j),
                                             exo.E * V.col(j));
  }
  RegulatorSolution sol;
  sol.Gamma = gamma_eig * V.adjoint();
  sol.Pi = steady_state_map(model, kappa, exo, sol.Gamma);
  return sol;
}

CMat steady_state_map(const StateSpaceModel& model, double kappa, const Exosystem& exo, const CMat& Gamma) {
  const CMat V = exo_eigenbasis(exo);
  const auto nv = exo.dim();
  const CMat gamma_eig = Gamma * V;
  const CMat Bc = model.Bc().cast<cplx>();
  const CMat Bd = model.Bd().cast<cplx>();
  CMat pi_eig(model.states(), nv);
  for (Eigen::Index j = 0; j < nv; ++j) {
    cplx lambda(0.0, 0.0);
    if (!(exo.has_constant_block && j == 0)) {
      const std::size_t k = static_cast<std::size_t>((j - (exo.has_constant_block ? 1 : 0)) / 2);
      const bool plus = ((j - (exo.has_constant_block ? 1 : 0)) % 2) == 0;
      lambda = cplx(0.0, plus ? exo.omegas[k] : -exo.omegas[k]);
    }
    CVec rhs = Bc * (gamma_eig.col(j) + kappa * exo.F * V.col(j));
    if (Bd.cols() > 0) rhs += Bd * (exo.E * V.col(j));
    pi_eig.col(j) = resolvent_solve(model, kappa, lambda, rhs);
  }
  return pi_eig * V.adjoint();
}

std::pair<double, double> regulator_residual(const StateSpaceModel& model, double /*kappa*/, const Exosystem& exo,
                                             const RegulatorSolution& sol) {
  if (sol.Pi.rows() != model.states() || sol.Pi.cols() != exo.dim() || sol.Gamma.rows() != model.inputs() ||
      sol.Gamma.cols() != exo.dim()) {
    throw DimensionMismatch("regulator_residual: solution dimensions do not match model/exosystem");
  }
  CMat r1 = sol.Pi * exo.A_exo.cast<cplx>() - model.A().cast<cplx>() * sol.Pi - model.Bc().cast<cplx>() * sol.Gamma;
  if (model.disturbances() > 0) r1 -= model.Bd().cast<cplx>() * exo.E;
  const CMat r2 = exo.F - model.C().cast<cplx>() * sol.Pi;
  return {r1.norm(), r2.norm()};
}

CMat feedforward_gain(const RegulatorCoefficients& coeffs, const Exosystem& exo) {
  if (coeffs.omegas.size() != exo.omegas.size()) {
    throw DimensionMismatch("feedforward_gain: coefficient and exosystem frequencies differ");
  }
  const cplx I(0.0, 1.0);
  CMat G = CMat::Zero(coeffs.dim(), exo.dim());
  if (exo.has_constant_block) G.col(0) = coeffs.f0;
  for (std::size_t k = 0; k < coeffs.omegas.size(); ++k) {
    const auto o = exo.block_offset(k);
    G.col(o) = 0.5 * (coeffs.f[k] + coeffs.g[k]);
    G.col(o + 1) = (coeffs.f[k] - coeffs.g[k]) / (2.0 * I);
  }
  return G;
}

SignalSpec measured_reference_from_disturbance(const StateSpaceModel& model, double kappa, const SignalSpec& spec,
                                               Exec exec) {
  spec.validate();
  check_model_signals(model, spec.output_dim(), spec.disturbance_dim());
  const bool constant = spec.has_constant_part();
  const auto resp = exo_frequency_response(model, kappa, spec.omegas(), constant, exec);
  const cplx I(0.0, 1.0);

  SignalSpec out = SignalSpec::zeros(spec.output_dim(), spec.disturbance_dim(), spec.omegas());
  std::size_t i = 0;
  if (constant) out.a0 = resp[i++].Pd * spec.c0;
  for (std::size_t k = 0; k < spec.harmonics.size(); ++k) {
    const auto& h = spec.harmonics[k];
    const CVec alpha = resp[i++].Pd * (h.c - I * h.d);  // a_k - i b_k
    const CVec beta = resp[i++].Pd * (h.c + I * h.d);   // a_k + i b_k
    out.harmonics[k].a = 0.5 * (alpha + beta);
    out.harmonics[k].b = 0.5 * I * (alpha - beta);
  }
  return out;
}

MarginGrid margin_grid(const RegulatorCoefficients& coeffs) {
  MarginGrid grid;
  if (coeffs.omegas.empty()) {
    grid.t_end = 1.0;
    grid.samples = 10000;
    return grid;
  }
  const double w1 = coeffs.omegas.front();
  long lcm_den = 1, gcd_num = 0;
  bool ok = true;
  for (double w : coeffs.omegas) {
    const auto [p, q] = rational_approx(w / w1, 1000, 1e-9);
    if (q == 0 || p <= 0) {
      ok = false;
      break;
    }
    lcm_den = std::lcm(lcm_den, q);
    gcd_num = std::gcd(gcd_num, p);
    if (lcm_den > 1000000) {
      ok = false;
      break;
    }
  }
  if (ok) {
    grid.commensurate = true;
    grid.t_end = 2.0 * M_PI / w1 * double(lcm_den) / double(gcd_num);
    grid.samples = 10000;
    return grid;
  }
  double wmin = coeffs.omegas.front();
  double amp = 0.0;
  for (std::size_t k = 0; k < coeffs.omegas.size(); ++k) {
    wmin = std::min(wmin, coeffs.omegas[k]);
    amp += coeffs.f[k].norm() + coeffs.g[k].norm();
  }
  grid.commensurate = false;
  grid.t_end = 100.0 / wmin;
  grid.samples = 100000;
  grid.slack = 1e-3 * amp;
  return grid;
}

double linear_regime_margin(const RegulatorCoefficients& coeffs, const SaturationSpec& sat, Exec exec) {
  if (coeffs.dim() != sat.dim()) throw DimensionMismatch("linear_regime_margin: dimension mismatch");
  const MarginGrid grid = margin_grid(coeffs);
  const double dt = grid.t_end / double(grid.samples);
  const double m = min_reduce(
      grid.samples, [&](std::size_t i) { return linear_slack(sat, eval_ureg_complex(coeffs, dt * double(i))); },
      exec);
  return m - grid.slack;
}

void write_coefficients_csv(std::ostream& out, const RegulatorCoefficients& coeffs) {
  const auto m = coeffs.dim();
  out << "k,omega";
  for (Eigen::Index j = 1; j <= m; ++j) {
    out << ",re_f_" << j << ",im_f_" << j << ",re_g_" << j << ",im_g_" << j;
  }
  out << '\n';
  char buf[40];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  auto row = [&](std::size_t k, double w, const CVec& f, const CVec& g) {
    out << k << ',' << num(w);
    for (Eigen::Index j = 0; j < m; ++j) {
      out << ',' << num(f[j].real()) << ',' << num(f[j].imag()) << ',' << num(g[j].real()) << ','
          << num(g[j].imag());
    }
    out << '\n';
  };
  row(0, 0.0, coeffs.f0, coeffs.f0);
  for (std::size_t k = 0; k < coeffs.omegas.size(); ++k) row(k + 1, coeffs.omegas[k], coeffs.f[k], coeffs.g[k]);
}

}  // namespace satreg
