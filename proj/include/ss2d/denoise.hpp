#pragma once

#include <vector>

#include "ss2d/sensor.hpp"
#include "ss2d/world_sim.hpp"

namespace ss2d::denoise {

/// Range of true distances that quantize to one observed value, clipped to the
/// visible range.
struct DistInterval {
  double lo = 0.0;
  double hi = 0.0;
  double mid = 0.0;
};

/// Inverts observe_distance by bisection on its monotone cell boundaries.
/// Throws a Validation error ("off-grid input") when `dq` is not an attainable output.
DistInterval invert_distance_quantization(double dq, const sensor::NoiseConfig& cfg);

/// Precomputed inversion table for every attainable output up to the visible range.
class DistanceInverter {
 public:
  explicit DistanceInverter(const sensor::NoiseConfig& cfg);

  /// Same result as invert_distance_quantization, served from the table.
  DistInterval invert(double dq) const;

 private:
  sensor::NoiseConfig cfg_;
  std::vector<DistInterval> table_;
  std::vector<bool> valid_;
};

/// Global position from the midpoint of the inverted distance interval.
Vec2 helios_estimate(const sensor::RawSighting& s, const sensor::Pose& observer, const sensor::NoiseConfig& cfg);

/// Global position using the quantized distance directly.
Vec2 naive_estimate(const sensor::RawSighting& s, const sensor::Pose& observer);

Vec2 last_seen_estimate(const sensor::Track& t);

/// Dead reckoning with decaying velocity: est_pos + est_vel * sum_{k=1..pos_count} decay^k.
Vec2 extrapolate_estimate(const sensor::Track& t, double decay);

sensor::PositionEstimator make_helios_estimator(const sensor::NoiseConfig& cfg);
sensor::PositionEstimator make_naive_estimator();

}  // namespace ss2d::denoise
