#pragma once

#include <cmath>
#include <numbers>

namespace ss2d {

inline constexpr double kPitchHalfLength = 52.5;
inline constexpr double kPitchHalfWidth = 34.0;
inline constexpr double kPitchMargin = 5.0;
inline constexpr double kMaxX = kPitchHalfLength + kPitchMargin;
inline constexpr double kMaxY = kPitchHalfWidth + kPitchMargin;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr bool operator==(const Vec2&) const = default;

  double norm() const { return std::hypot(x, y); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y); }

  /// Direction in degrees, [-180, 180].
  double angle_deg() const { return std::atan2(y, x) * 180.0 / std::numbers::pi; }

  static Vec2 polar(double r, double deg) {
    const double rad = deg * std::numbers::pi / 180.0;
    return {r * std::cos(rad), r * std::sin(rad)};
  }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

/// Wraps an angle in degrees into [-180, 180).
inline double normalize_deg(double deg) {
  double a = std::fmod(deg + 180.0, 360.0);
  if (a < 0.0) a += 360.0;
  return a - 180.0;
}

inline Vec2 clamp_norm(Vec2 v, double max_norm) {
  const double n = v.norm();
  if (n > max_norm && n > 0.0) return v * (max_norm / n);
  return v;
}

}  // namespace ss2d
