#include <gtest/gtest.h>

#include <random>

#include "oracles/quantizer_cells.hpp"
#include "ss2d/denoise.hpp"
#include "ss2d/error.hpp"

using namespace ss2d;
using namespace ss2d::denoise;
using sensor::NoiseConfig;

namespace {

const std::map<long long, oracle::Cell>& cells() {
  static const auto c = oracle::scan_cells(NoiseConfig{});
  return c;
}

}  // namespace

TEST(Invert, MatchesBruteForceScanEverywhere) {
  const NoiseConfig cfg;
  for (const auto& [key, cell] : cells()) {
    const double dq = static_cast<double>(key) * cfg.dist_outstep;
    const auto iv = invert_distance_quantization(dq, cfg);
    EXPECT_NEAR(iv.lo, key == 0 ? 0.0 : cell.lo, 2e-3) << dq;
    EXPECT_NEAR(iv.hi, cell.hi, 2e-3) << dq;
    EXPECT_EQ(oracle::cell_key(sensor::observe_distance(iv.mid, cfg), cfg), key) << dq;
  }
}

TEST(Invert, ZeroCellStartsAtZero) {
  const NoiseConfig cfg;
  const auto iv = invert_distance_quantization(0.0, cfg);
  EXPECT_EQ(iv.lo, 0.0);
  EXPECT_NEAR(iv.hi, cells().at(0).hi, 2e-3);
}

TEST(Invert, OneMetreStraddlesOne) {
  const NoiseConfig cfg;
  const auto iv = invert_distance_quantization(1.0, cfg);
  EXPECT_LT(iv.lo, 1.0);
  EXPECT_GT(iv.hi, 1.0);
  EXPECT_LE(std::abs(iv.mid - 1.0), iv.hi - iv.lo);
}

TEST(Invert, TopCellClippedToVisibleRange) {
  const NoiseConfig cfg;
  const double dq = sensor::observe_distance(60.0, cfg);
  EXPECT_EQ(invert_distance_quantization(dq, cfg).hi, cfg.visible_distance);
}

TEST(Invert, OffGridInputsRejected) {
  const NoiseConfig cfg;
  EXPECT_THROW(invert_distance_quantization(1.05, cfg), Error);
  EXPECT_THROW(invert_distance_quantization(-0.1, cfg), Error);
  bool found_gap = false;
  for (long long k = 1; k < 600; ++k) {
    if (cells().count(k) == 0) {
      found_gap = true;
      try {
        invert_distance_quantization(static_cast<double>(k) * cfg.dist_outstep, cfg);
        ADD_FAILURE() << "no error for unattainable " << k;
      } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("off-grid input"), std::string::npos);
      }
    }
  }
  EXPECT_TRUE(found_gap);
}

TEST(Invert, TableMatchesDirectBisection) {
  const NoiseConfig cfg;
  const DistanceInverter inv(cfg);
  for (const auto& [key, cell] : cells()) {
    const double dq = static_cast<double>(key) * cfg.dist_outstep;
    const auto a = inv.invert(dq);
    const auto b = invert_distance_quantization(dq, cfg);
    EXPECT_EQ(a.lo, b.lo);
    EXPECT_EQ(a.hi, b.hi);
  }
}

TEST(Helios, OneMetreAheadLandsOnMidpoint) {
  const NoiseConfig cfg;
  const auto iv = invert_distance_quantization(1.0, cfg);
  const Vec2 p = helios_estimate({{}, 1.0, 0}, {{0, 0}, 0}, cfg);
  EXPECT_NEAR(p.x, iv.mid, 1e-12);
  EXPECT_NEAR(p.y, 0.0, 1e-12);
}

TEST(Helios, RotationAndTranslationEquivariant) {
  const NoiseConfig cfg;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-30, 30), ua(-180, 180);
  const sensor::RawSighting s{{}, sensor::observe_distance(12.3, cfg), 17};
  const Vec2 base = helios_estimate(s, {{0, 0}, 0}, cfg);
  for (int i = 0; i < 200; ++i) {
    const Vec2 o{u(rng), u(rng)};
    const double rot = ua(rng);
    const Vec2 p = helios_estimate(s, {o, rot}, cfg) - o;
    EXPECT_NEAR(p.norm(), base.norm(), 1e-9);
    EXPECT_NEAR(std::remainder(p.angle_deg() - base.angle_deg() - rot, 360.0), 0.0, 1e-9);
  }
}

TEST(Helios, EstimateWithinHalfCellOfTruth) {
  const NoiseConfig cfg;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> ud(0.5, 59.9);
  for (int i = 0; i < 20000; ++i) {
    const double d = ud(rng);
    const double dq = sensor::observe_distance(d, cfg);
    const auto iv = invert_distance_quantization(dq, cfg);
    EXPECT_LE(std::abs(iv.mid - d), 0.5 * (iv.hi - iv.lo) + 1e-9);
  }
}

TEST(LastSeen, RequiresInitializedTrack) {
  EXPECT_THROW(last_seen_estimate(sensor::Track{}), Error);
  EXPECT_THROW(extrapolate_estimate(sensor::Track{}, 0.4), Error);
}

TEST(LastSeen, NeverMoves) {
  sensor::Track t;
  t.initialized = true;
  t.est_pos = {3, 4};
  t.est_vel = {1, 0};
  t.pos_count = 5;
  EXPECT_EQ(last_seen_estimate(t), (Vec2{3, 4}));
  EXPECT_EQ(last_seen_estimate(t), last_seen_estimate(t));
}

TEST(Extrapolate, Examples) {
  sensor::Track t;
  t.initialized = true;
  t.est_pos = {2, 1};
  t.est_vel = {1, 0};
  EXPECT_EQ(extrapolate_estimate(t, 0.4), (Vec2{2, 1}));
  t.pos_count = 1;
  const Vec2 p = extrapolate_estimate(t, 0.4);
  EXPECT_NEAR(p.x, 2.4, 1e-15);
  EXPECT_NEAR(p.y, 1.0, 1e-15);
  t.pos_count = 100000;
  EXPECT_LE(extrapolate_estimate(t, 0.4).x - 2.0, 0.4 / 0.6 + 1e-12);
  EXPECT_NEAR(extrapolate_estimate(t, 0.4).x - 2.0, 0.4 / 0.6, 1e-12);
}
