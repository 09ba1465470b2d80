#include "satreg/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace satreg {

namespace {

bool all_zero(const CVec& v) { return v.size() == 0 || v.cwiseAbs().maxCoeff() == 0.0; }
bool all_real(const CVec& v) { return v.size() == 0 || v.imag().cwiseAbs().maxCoeff() == 0.0; }

}  // namespace

bool SignalSpec::has_constant_part() const { return !all_zero(a0) || !all_zero(c0); }

bool SignalSpec::is_real() const {
  if (!all_real(a0) || !all_real(c0)) return false;
  for (const auto& h : harmonics) {
    if (!all_real(h.a) || !all_real(h.b) || !all_real(h.c) || !all_real(h.d)) return false;
  }
  return true;
}

std::vector<double> SignalSpec::omegas() const {
  std::vector<double> w;
  w.reserve(harmonics.size());
  for (const auto& h : harmonics) w.push_back(h.omega);
  return w;
}

double SignalSpec::min_omega() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& h : harmonics) m = std::min(m, h.omega);
  return m;
}

double SignalSpec::max_omega() const {
  double m = 0.0;
  for (const auto& h : harmonics) m = std::max(m, h.omega);
  return m;
}

void SignalSpec::validate() const {
  const auto nu = output_dim();
  const auto nd = disturbance_dim();
  if (nu < 1) throw DimensionMismatch("signal spec: a0 must have the output dimension (>= 1)");
  for (std::size_t k = 0; k < harmonics.size(); ++k) {
    const auto& h = harmonics[k];
    if (!(h.omega > 0.0) || !std::isfinite(h.omega)) {
      throw InvalidArgument("signal spec: frequency " + std::to_string(k + 1) + " must be positive");
    }
    if (h.a.size() != nu || h.b.size() != nu) {
      throw DimensionMismatch("signal spec: a_k/b_k dimension differs from a_0 at k = " + std::to_string(k + 1));
    }
    if (h.c.size() != nd || h.d.size() != nd) {
      throw DimensionMismatch("signal spec: c_k/d_k dimension differs from c_0 at k = " + std::to_string(k + 1));
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (std::abs(harmonics[j].omega - h.omega) <= 1e-12) {
        throw InvalidArgument("signal spec: duplicate frequency " + std::to_string(h.omega));
      }
    }
  }
}

SignalSpec SignalSpec::zeros(Eigen::Index output_dim, Eigen::Index disturbance_dim,
                             const std::vector<double>& omegas) {
  SignalSpec s;
  s.a0 = CVec::Zero(output_dim);
  s.c0 = CVec::Zero(disturbance_dim);
  for (double w : omegas) {
    s.harmonics.push_back({w, CVec::Zero(output_dim), CVec::Zero(output_dim), CVec::Zero(disturbance_dim),
                           CVec::Zero(disturbance_dim)});
  }
  return s;
}

SignalSpec SignalSpec::scaled(double s) const {
  SignalSpec out = *this;
  out.a0 *= s;
  out.c0 *= s;
  for (auto& h : out.harmonics) {
    h.a *= s;
    h.b *= s;
    h.c *= s;
    h.d *= s;
  }
  return out;
}

CVec eval_reference(const SignalSpec& spec, double t) {
  if (t < 0.0) throw InvalidArgument("eval_reference: t must be nonnegative");
  CVec y = spec.a0;
  for (const auto& h : spec.harmonics) {
    y += h.a * std::cos(h.omega * t) + h.b * std::sin(h.omega * t);
  }
  return y;
}

CVec eval_disturbance(const SignalSpec& spec, double t) {
  if (t < 0.0) throw InvalidArgument("eval_disturbance: t must be nonnegative");
  CVec w = spec.c0;
  for (const auto& h : spec.harmonics) {
    w += h.c * std::cos(h.omega * t) + h.d * std::sin(h.omega * t);
  }
  return w;
}

Exosystem build_exosystem(const SignalSpec& spec) {
  spec.validate();
  Exosystem exo;
  exo.has_constant_block = spec.has_constant_part();
  exo.omegas = spec.omegas();
  const Eigen::Index off = exo.has_constant_block ? 1 : 0;
  const Eigen::Index dim = off + 2 * Eigen::Index(spec.harmonics.size());

  exo.A_exo = Mat::Zero(dim, dim);
  exo.E = CMat::Zero(spec.disturbance_dim(), dim);
  exo.F = CMat::Zero(spec.output_dim(), dim);
  exo.v0 = Vec::Zero(dim);
  if (exo.has_constant_block) {
    exo.E.col(0) = spec.c0;
    exo.F.col(0) = spec.a0;
    exo.v0[0] = 1.0;
  }
  for (std::size_t k = 0; k < spec.harmonics.size(); ++k) {
    const auto& h = spec.harmonics[k];
    const Eigen::Index j = exo.block_offset(k);
    exo.A_exo(j, j + 1) = h.omega;
    exo.A_exo(j + 1, j) = -h.omega;
    exo.E.col(j) = h.c;
    exo.E.col(j + 1) = -h.d;
    exo.F.col(j) = h.a;
    exo.F.col(j + 1) = -h.b;
    exo.v0[j] = 1.0;
  }
  return exo;
}

Vec exo_state(const Exosystem& exo, double t) {
  if (t < 0.0) throw InvalidArgument("exo_state: t must be nonnegative");
  Vec v = Vec::Zero(exo.dim());
  if (exo.has_constant_block) v[0] = 1.0;
  for (std::size_t k = 0; k < exo.omegas.size(); ++k) {
    const Eigen::Index j = exo.block_offset(k);
    v[j] = std::cos(exo.omegas[k] * t);
    v[j + 1] = -std::sin(exo.omegas[k] * t);
  }
  return v;
}

}  // namespace satreg
