#include "satreg/saturation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace satreg {

namespace {

inline double abs2(double x) { return x * x; }
inline double abs2(cplx z) { return z.real() * z.real() + z.imag() * z.imag(); }

// Shared by the real and complex paths so both perform the same operations
// in the same order.
template <typename Scalar>
double channel_distance(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& u, Eigen::Index offset,
                        const SaturationChannel& ch) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < ch.dim(); ++i) {
    Scalar r;
    if constexpr (std::is_same_v<Scalar, double>) {
      r = ch.center[i].real();
    } else {
      r = ch.center[i];
    }
    s += abs2(u[offset + i] - r);
  }
  return std::sqrt(s);
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> saturate_impl(
    const SaturationSpec& spec, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& u) {
  if (u.size() != spec.dim()) {
    throw DimensionMismatch("saturate: input has dimension " + std::to_string(u.size()) +
                            ", saturation expects " + std::to_string(spec.dim()));
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out = u;
  Eigen::Index offset = 0;
  for (const auto& ch : spec.channels()) {
    const double dist = channel_distance(u, offset, ch);
    // r + delta (u - r) / max{delta, |u - r|}, branched so that inputs inside
    // the ball are returned unchanged.
    if (dist > ch.radius) {
      const double scale = ch.radius / dist;
      for (Eigen::Index i = 0; i < ch.dim(); ++i) {
        Scalar r;
        if constexpr (std::is_same_v<Scalar, double>) {
          r = ch.center[i].real();
        } else {
          r = ch.center[i];
        }
        out[offset + i] = r + scale * (u[offset + i] - r);
      }
    }
    offset += ch.dim();
  }
  return out;
}

template <typename Scalar>
double slack_impl(const SaturationSpec& spec, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& u) {
  if (u.size() != spec.dim()) {
    throw DimensionMismatch("linear_slack: dimension mismatch");
  }
  double slack = std::numeric_limits<double>::infinity();
  Eigen::Index offset = 0;
  for (const auto& ch : spec.channels()) {
    slack = std::min(slack, ch.radius - channel_distance(u, offset, ch));
    offset += ch.dim();
  }
  return slack;
}

}  // namespace

SaturationSpec::SaturationSpec(std::vector<SaturationChannel> channels) : channels_(std::move(channels)) {
  for (const auto& ch : channels_) {
    if (!(ch.radius > 0.0) || !std::isfinite(ch.radius)) {
      throw InvalidArgument("saturation radius must be positive and finite");
    }
    if (ch.dim() < 1) {
      throw InvalidArgument("saturation channel must have positive dimension");
    }
    dim_ += ch.dim();
  }
}

SaturationSpec SaturationSpec::scalar(const std::vector<double>& centers, const std::vector<double>& radii) {
  if (centers.size() != radii.size()) {
    throw DimensionMismatch("SaturationSpec::scalar: centers and radii differ in length");
  }
  std::vector<SaturationChannel> chans;
  for (std::size_t k = 0; k < centers.size(); ++k) {
    CVec c(1);
    c[0] = centers[k];
    chans.push_back({c, radii[k]});
  }
  return SaturationSpec(std::move(chans));
}

double SaturationSpec::min_radius() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& ch : channels_) m = std::min(m, ch.radius);
  return m;
}

double SaturationSpec::center_clearance() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& ch : channels_) m = std::min(m, ch.radius - ch.center.norm());
  return m;
}

bool SaturationSpec::real_centers() const {
  for (const auto& ch : channels_) {
    if (ch.center.imag().cwiseAbs().maxCoeff() != 0.0) return false;
  }
  return true;
}

CVec saturate(const SaturationSpec& spec, const CVec& u) { return saturate_impl(spec, u); }

Vec saturate(const SaturationSpec& spec, const Vec& u) {
  if (!spec.real_centers()) {
    throw InvalidArgument("real saturate path requires real centers");
  }
  return saturate_impl(spec, u);
}

bool in_linear_region(const SaturationSpec& spec, const CVec& u, double margin) {
  if (!(margin >= 0.0) || margin >= spec.min_radius()) {
    throw InvalidArgument("in_linear_region: margin must satisfy 0 <= margin < min radius");
  }
  return slack_impl(spec, u) >= margin;
}

double linear_slack(const SaturationSpec& spec, const CVec& u) { return slack_impl(spec, u); }
double linear_slack(const SaturationSpec& spec, const Vec& u) { return slack_impl(spec, u); }

bool saturation_active(const SaturationSpec& spec, const Vec& u) { return slack_impl(spec, u) < 0.0; }

}  // namespace satreg
