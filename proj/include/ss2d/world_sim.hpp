#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ss2d/geometry.hpp"

namespace ss2d::sim {

enum class Side : std::uint8_t { Left, Right };
enum class ObjectKind : std::uint8_t { Player, Ball };

inline constexpr int kTeamSize = 11;
inline constexpr int kNumPlayers = 2 * kTeamSize;

/// Identifies a player (side, unum 1..11) or the ball (unum 0).
struct ObjectId {
  Side side = Side::Left;
  int unum = 0;

  static constexpr ObjectId ball() { return {Side::Left, 0}; }
  constexpr bool is_ball() const { return unum == 0; }
  /// Index into WorldState::players; left team first.
  constexpr int player_index() const { return (side == Side::Left ? 0 : kTeamSize) + unum - 1; }
  static constexpr ObjectId from_player_index(int i) {
    return {i < kTeamSize ? Side::Left : Side::Right, i % kTeamSize + 1};
  }
  constexpr bool operator==(const ObjectId&) const = default;

  /// "L9", "R3", "B".
  std::string to_string() const;
  static ObjectId parse(const std::string& text);
};

struct ObjectState {
  Vec2 pos;
  Vec2 vel;
  double body_dir = 0.0;
};

struct WorldState {
  int cycle = 0;
  std::array<ObjectState, kNumPlayers> players{};
  ObjectState ball;

  const ObjectState& object(ObjectId id) const {
    return id.is_ball() ? ball : players[static_cast<std::size_t>(id.player_index())];
  }
};

using Trajectory = std::vector<WorldState>;

struct KinematicsConfig {
  double player_decay = 0.4;
  double ball_decay = 0.94;
  double player_speed_max = 1.05;
  double ball_speed_max = 3.0;
  double player_accel_max = 0.1;
  double ball_accel_max = 2.7;
  int episode_len = 6000;

  void validate() const;
  double decay(ObjectKind k) const { return k == ObjectKind::Player ? player_decay : ball_decay; }
  double speed_max(ObjectKind k) const { return k == ObjectKind::Player ? player_speed_max : ball_speed_max; }
  double accel_max(ObjectKind k) const { return k == ObjectKind::Player ? player_accel_max : ball_accel_max; }
};

/// Kickoff positions of the left team, unum 1..11. The right team mirrors x.
using Formation = std::array<Vec2, kTeamSize>;

Formation default_formation();

/// Tunables of the scripted team behaviour.
struct PolicyConfig {
  double kickable_dist = 1.0;
  double max_turn_deg = 60.0;
  int roam_block = 120;
  double roam_prob = 0.3;
  int scan_block = 6;
  double scan_prob = 0.5;
  double noise_scale = 0.3;
};

struct SimConfig {
  KinematicsConfig kinematics;
  Formation formation = default_formation();
  PolicyConfig policy;
};

struct Actions {
  std::array<Vec2, kNumPlayers> accel{};
  std::array<double, kNumPlayers> turn_to{};
  /// Ball acceleration from a kick this cycle; zero when nobody kicks.
  Vec2 kick;
  int kicker = -1;
};

/// Accelerate, clamp speed, move, decay; positions are held inside the pitch margin.
ObjectState step_object(const ObjectState& s, Vec2 accel, const KinematicsConfig& cfg, ObjectKind kind);

Actions scripted_policy(const WorldState& state, std::uint64_t seed, const SimConfig& cfg);

WorldState kickoff_state(const Formation& formation);

/// Applies one cycle of actions to a state.
WorldState advance(const WorldState& state, const Actions& actions, const SimConfig& cfg);

Trajectory run_episode(const SimConfig& cfg, std::uint64_t seed);
inline Trajectory run_episode(const KinematicsConfig& kin, std::uint64_t seed) {
  SimConfig cfg;
  cfg.kinematics = kin;
  return run_episode(cfg, seed);
}

/// Rows: cycle,side,unum,x,y,vx,vy,body_dir (unum 0 = ball).
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const std::string& header_comment);
Trajectory read_trajectory_csv(std::istream& is);

}  // namespace ss2d::sim
