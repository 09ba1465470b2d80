#pragma once

#include <vector>

#include "satreg/types.hpp"

namespace satreg {

/// One block of the decomposed saturation: the closed ball B(center, radius).
struct SaturationChannel {
  CVec center;
  double radius = 1.0;

  Eigen::Index dim() const { return center.size(); }
};

/// Per-channel radial saturation on U = U_1 x ... x U_p. Each channel maps
/// u_k to its metric projection onto the ball around r_k of radius delta_k.
class SaturationSpec {
 public:
  SaturationSpec() = default;
  explicit SaturationSpec(std::vector<SaturationChannel> channels);

  /// Scalar channels, one per entry.
  static SaturationSpec scalar(const std::vector<double>& centers, const std::vector<double>& radii);

  const std::vector<SaturationChannel>& channels() const { return channels_; }
  Eigen::Index dim() const { return dim_; }
  double min_radius() const;
  /// Smallest delta_k - |r_k|; positive iff every center lies strictly inside its ball.
  double center_clearance() const;
  bool centers_strictly_inside() const { return center_clearance() > 0.0; }
  bool real_centers() const;

 private:
  std::vector<SaturationChannel> channels_;
  Eigen::Index dim_ = 0;
};

CVec saturate(const SaturationSpec& spec, const CVec& u);

/// Real fast path. Requires real centers; the result is bit-identical to the
/// complex path applied to the same values.
Vec saturate(const SaturationSpec& spec, const Vec& u);

/// True iff |u_k - r_k| <= delta_k - margin for all channels. Requires
/// 0 <= margin < min_k delta_k.
bool in_linear_region(const SaturationSpec& spec, const CVec& u, double margin);

/// min_k (delta_k - |u_k - r_k|): the largest margin for which u is in the
/// linear region; negative when some channel is clipped.
double linear_slack(const SaturationSpec& spec, const CVec& u);
double linear_slack(const SaturationSpec& spec, const Vec& u);

/// True when some channel is strictly outside its ball.
bool saturation_active(const SaturationSpec& spec, const Vec& u);

}  // namespace satreg
