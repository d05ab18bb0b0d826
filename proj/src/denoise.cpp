#include "ss2d/denoise.hpp"

#include <cmath>
#include <memory>

#include "ss2d/error.hpp"

namespace ss2d::denoise {

namespace {

constexpr int kBisectionSteps = 80;

long long grid_index(double v, double step) { return std::llround(v / step); }

/// Smallest d in [a, b] with index(observe(d)) > k, assuming index(observe(a)) <= k
/// and index(observe(b)) > k.
double upper_boundary(long long k, double a, double b, const sensor::NoiseConfig& cfg) {
  for (int i = 0; i < kBisectionSteps; ++i) {
    const double m = 0.5 * (a + b);
    if (grid_index(sensor::observe_distance(m, cfg), cfg.dist_outstep) > k) {
      b = m;
    } else {
      a = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

DistInterval invert_distance_quantization(double dq, const sensor::NoiseConfig& cfg) {
  if (!(dq >= 0) || !std::isfinite(dq)) fail(ErrorCategory::Validation, "off-grid input: negative distance");
  const double steps = dq / cfg.dist_outstep;
  const long long k = std::llround(steps);
  if (std::abs(steps - static_cast<double>(k)) > 1e-6)
    fail(ErrorCategory::Validation, "off-grid input: " + std::to_string(dq) + " is not on the output grid");

  double top = 2.0 * dq + 1.0;
  while (grid_index(sensor::observe_distance(top, cfg), cfg.dist_outstep) <= k) top *= 2.0;

  DistInterval iv;
  iv.lo = k == 0 ? 0.0 : upper_boundary(k - 1, 0.0, top, cfg);
  iv.hi = std::min(upper_boundary(k, 0.0, top, cfg), cfg.visible_distance);
  iv.mid = 0.5 * (iv.lo + iv.hi);
  if (iv.hi <= iv.lo || grid_index(sensor::observe_distance(iv.mid, cfg), cfg.dist_outstep) != k)
    fail(ErrorCategory::Validation, "off-grid input: " + std::to_string(dq) + " is not attainable");
  return iv;
}

DistanceInverter::DistanceInverter(const sensor::NoiseConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  const auto n = static_cast<std::size_t>(std::ceil(cfg.visible_distance * 1.2 / cfg.dist_outstep)) + 2;
  table_.resize(n);
  valid_.assign(n, false);
  for (std::size_t k = 0; k < n; ++k) {
    try {
      table_[k] = invert_distance_quantization(static_cast<double>(k) * cfg.dist_outstep, cfg_);
      valid_[k] = true;
    } catch (const Error&) {
    }
  }
}

DistInterval DistanceInverter::invert(double dq) const {
  const double steps = dq / cfg_.dist_outstep;
  const long long k = std::llround(steps);
  if (k >= 0 && static_cast<std::size_t>(k) < table_.size() && std::abs(steps - static_cast<double>(k)) <= 1e-6) {
    if (valid_[static_cast<std::size_t>(k)]) return table_[static_cast<std::size_t>(k)];
  }
  return invert_distance_quantization(dq, cfg_);
}

Vec2 helios_estimate(const sensor::RawSighting& s, const sensor::Pose& observer, const sensor::NoiseConfig& cfg) {
  const DistInterval iv = invert_distance_quantization(s.quantized_dist, cfg);
  return observer.pos + Vec2::polar(iv.mid, observer.body_dir + s.angle_deg);
}

Vec2 naive_estimate(const sensor::RawSighting& s, const sensor::Pose& observer) {
  return sensor::naive_position(s, observer);
}

Vec2 last_seen_estimate(const sensor::Track& t) {
  if (!t.initialized) fail(ErrorCategory::Validation, "last_seen_estimate: track never initialized");
  return t.est_pos;
}

Vec2 extrapolate_estimate(const sensor::Track& t, double decay) {
  if (!t.initialized) fail(ErrorCategory::Validation, "extrapolate_estimate: track never initialized");
  double gain = 0.0;
  double term = 1.0;
  for (int k = 1; k <= t.pos_count; ++k) {
    term *= decay;
    gain += term;
  }
  return t.est_pos + t.est_vel * gain;
}

sensor::PositionEstimator make_helios_estimator(const sensor::NoiseConfig& cfg) {
  auto inverter = std::make_shared<const DistanceInverter>(cfg);
  return [inverter](const sensor::RawSighting& s, const sensor::Pose& p) {
    return p.pos + Vec2::polar(inverter->invert(s.quantized_dist).mid, p.body_dir + s.angle_deg);
  };
}

sensor::PositionEstimator make_naive_estimator() { return &naive_estimate; }

}  // namespace ss2d::denoise
