#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "ss2d/error.hpp"
#include "ss2d/world_sim.hpp"

using namespace ss2d;
using namespace ss2d::sim;

namespace {

KinematicsConfig short_episode(int len) {
  KinematicsConfig k;
  k.episode_len = len;
  return k;
}

bool same_state(const WorldState& a, const WorldState& b) {
  if (a.cycle != b.cycle || !(a.ball.pos == b.ball.pos) || !(a.ball.vel == b.ball.vel)) return false;
  for (int i = 0; i < kNumPlayers; ++i) {
    const auto& p = a.players[static_cast<std::size_t>(i)];
    const auto& q = b.players[static_cast<std::size_t>(i)];
    if (!(p.pos == q.pos) || !(p.vel == q.vel) || p.body_dir != q.body_dir) return false;
  }
  return true;
}

}  // namespace

TEST(StepObject, RestStaysAtRest) {
  const auto s = step_object({}, {0, 0}, KinematicsConfig{}, ObjectKind::Player);
  EXPECT_EQ(s.pos, (Vec2{0, 0}));
  EXPECT_EQ(s.vel, (Vec2{0, 0}));
}

TEST(StepObject, PlayerMovesThenDecays) {
  ObjectState s;
  s.vel = {1, 0};
  const auto n = step_object(s, {0, 0}, KinematicsConfig{}, ObjectKind::Player);
  EXPECT_DOUBLE_EQ(n.pos.x, 1.0);
  EXPECT_DOUBLE_EQ(n.pos.y, 0.0);
  EXPECT_DOUBLE_EQ(n.vel.x, 0.4);
}

TEST(StepObject, SpeedClampedBeforeMove) {
  ObjectState s;
  s.vel = {1.05, 0};
  const auto n = step_object(s, {0.1, 0}, KinematicsConfig{}, ObjectKind::Player);
  EXPECT_DOUBLE_EQ(n.pos.x, 1.05);
  EXPECT_DOUBLE_EQ(n.vel.x, 1.05 * 0.4);
}

TEST(StepObject, BallUsesBallConstants) {
  ObjectState s;
  s.vel = {2.0, 0};
  const auto n = step_object(s, {2.0, 0}, KinematicsConfig{}, ObjectKind::Ball);
  EXPECT_DOUBLE_EQ(n.pos.x, 3.0);
  EXPECT_DOUBLE_EQ(n.vel.x, 3.0 * 0.94);
}

TEST(StepObject, HeldInsidePitchMargin) {
  ObjectState s;
  s.pos = {kMaxX - 0.2, 0};
  s.vel = {1.0, 0};
  const auto n = step_object(s, {0, 0}, KinematicsConfig{}, ObjectKind::Player);
  EXPECT_DOUBLE_EQ(n.pos.x, kMaxX);
  EXPECT_DOUBLE_EQ(n.vel.x, 0.0);
}

TEST(StepObject, RejectsNonFiniteAndExcessAccel) {
  ObjectState s;
  s.pos = {std::nan(""), 0};
  EXPECT_THROW(step_object(s, {0, 0}, KinematicsConfig{}, ObjectKind::Player), Error);
  EXPECT_THROW(step_object({}, {0.5, 0}, KinematicsConfig{}, ObjectKind::Player), Error);
}

TEST(ScriptedPolicy, DeterministicPerStateAndSeed) {
  SimConfig cfg;
  const auto w = kickoff_state(cfg.formation);
  const auto a = scripted_policy(w, 5, cfg);
  const auto b = scripted_policy(w, 5, cfg);
  for (int i = 0; i < kNumPlayers; ++i) {
    EXPECT_EQ(a.accel[static_cast<std::size_t>(i)], b.accel[static_cast<std::size_t>(i)]);
    EXPECT_EQ(a.turn_to[static_cast<std::size_t>(i)], b.turn_to[static_cast<std::size_t>(i)]);
  }
  EXPECT_EQ(a.kick, b.kick);
}

TEST(ScriptedPolicy, DifferentSeedsDivergeWithinTenCycles) {
  SimConfig cfg;
  cfg.kinematics.episode_len = 10;
  const auto t1 = run_episode(cfg, 1);
  const auto t2 = run_episode(cfg, 2);
  bool differ = false;
  for (std::size_t c = 0; c < t1.size(); ++c) differ = differ || !same_state(t1[c], t2[c]);
  EXPECT_TRUE(differ);
}

TEST(ScriptedPolicy, AccelerationsWithinBounds) {
  SimConfig cfg;
  WorldState zero;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto act = scripted_policy(zero, seed, cfg);
    for (const auto& a : act.accel) EXPECT_LE(a.norm(), cfg.kinematics.player_accel_max * (1 + 1e-9));
    EXPECT_LE(act.kick.norm(), cfg.kinematics.ball_accel_max * (1 + 1e-9));
  }
}

TEST(RunEpisode, LengthIncludesKickoff) {
  EXPECT_EQ(run_episode(short_episode(0), 3).size(), 1u);
  EXPECT_EQ(run_episode(short_episode(6000), 3).size(), 6001u);
}

TEST(RunEpisode, KickoffMatchesFormation) {
  const auto traj = run_episode(short_episode(0), 3);
  const auto f = default_formation();
  EXPECT_EQ(traj[0].players[4].pos, f[4]);
  EXPECT_EQ(traj[0].players[8].pos, (Vec2{-3.0, 0.0}));
  EXPECT_EQ(traj[0].players[kTeamSize + 8].pos, (Vec2{3.0, 0.0}));
  EXPECT_EQ(traj[0].ball.pos, (Vec2{0, 0}));
}

TEST(RunEpisode, DeterministicFinalState) {
  const auto a = run_episode(short_episode(500), 42);
  const auto b = run_episode(short_episode(500), 42);
  EXPECT_TRUE(same_state(a.back(), b.back()));
}

TEST(RunEpisode, SpeedAndPitchBoundsHoldEverywhere) {
  const KinematicsConfig k = short_episode(6000);
  for (std::uint64_t seed : {1u, 2u}) {
    for (const auto& w : run_episode(k, seed)) {
      auto check = [&](const ObjectState& s, ObjectKind kind) {
        EXPECT_LE(s.vel.norm(), k.speed_max(kind) * k.decay(kind) * (1 + 1e-12));
        EXPECT_LE(std::abs(s.pos.x), kMaxX);
        EXPECT_LE(std::abs(s.pos.y), kMaxY);
      };
      for (const auto& p : w.players) check(p, ObjectKind::Player);
      check(w.ball, ObjectKind::Ball);
    }
  }
}

TEST(RunEpisode, ObserverObjectDistanceCoversTenBins) {
  const auto traj = run_episode(short_episode(6000), 1);
  const ObjectId l9{Side::Left, 9}, l5{Side::Left, 5};
  std::set<int> bins;
  for (const auto& w : traj) {
    const double d = distance(w.object(l9).pos, w.object(l5).pos);
    if (d < 40.0) bins.insert(static_cast<int>(d / 4.0));
  }
  EXPECT_GE(bins.size(), 10u);
}

TEST(ObjectIdText, ParseAndPrint) {
  EXPECT_EQ(ObjectId::parse("L9"), (ObjectId{Side::Left, 9}));
  EXPECT_EQ(ObjectId::parse("R11"), (ObjectId{Side::Right, 11}));
  EXPECT_TRUE(ObjectId::parse("B").is_ball());
  EXPECT_EQ((ObjectId{Side::Right, 3}).to_string(), "R3");
  EXPECT_THROW(ObjectId::parse("L12"), Error);
  EXPECT_THROW(ObjectId::parse("X1"), Error);
  for (int i = 0; i < kNumPlayers; ++i) EXPECT_EQ(ObjectId::from_player_index(i).player_index(), i);
}

TEST(TrajectoryCsv, RoundTripIsExact) {
  const auto traj = run_episode(short_episode(30), 9);
  std::stringstream ss;
  write_trajectory_csv(ss, traj, "seed=9");
  const auto back = read_trajectory_csv(ss);
  ASSERT_EQ(back.size(), traj.size());
  for (std::size_t c = 0; c < traj.size(); ++c) EXPECT_TRUE(same_state(traj[c], back[c])) << c;
}
