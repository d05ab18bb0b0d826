#include "ss2d/world_sim.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include "ss2d/csv.hpp"
#include "ss2d/error.hpp"
#include "ss2d/hash.hpp"

namespace ss2d::sim {

namespace {

constexpr std::uint64_t kRoamTag = 1;
constexpr std::uint64_t kWaypointTag = 2;
constexpr std::uint64_t kScanTag = 3;
constexpr std::uint64_t kNoiseTag = 4;
constexpr std::uint64_t kKickTag = 5;
constexpr int kNoiseHold = 5;

double hashed_unit(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t tag) {
  return unit_from_hash(hash_keys(seed, a, b, tag));
}

Vec2 mirrored(Vec2 left_pos, Side side) {
  return side == Side::Left ? left_pos : Vec2{-left_pos.x, left_pos.y};
}

Vec2 clamp_to_pitch(Vec2 p) {
  return {std::clamp(p.x, -kPitchHalfLength, kPitchHalfLength),
          std::clamp(p.y, -kPitchHalfWidth, kPitchHalfWidth)};
}

double turn_toward(double from, double to, double max_turn) {
  const double delta = normalize_deg(to - from);
  return normalize_deg(from + std::clamp(delta, -max_turn, max_turn));
}

int nearest_player(const WorldState& s, Vec2 p, int first, int last) {
  int best = first;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = first; i < last; ++i) {
    const double d = distance(s.players[static_cast<std::size_t>(i)].pos, p);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

Vec2 kick_target(const WorldState& s, std::uint64_t seed, int kicker, std::uint64_t block) {
  const ObjectId id = ObjectId::from_player_index(kicker);
  const double attack = id.side == Side::Left ? 1.0 : -1.0;
  const double r = hashed_unit(seed, static_cast<std::uint64_t>(kicker), block, kKickTag);
  if (r < 0.35) {
    const double y = (hashed_unit(seed, static_cast<std::uint64_t>(kicker), block, kKickTag + 10) - 0.5) * 14.0;
    return {attack * kPitchHalfLength, y};
  }
  const int base = id.side == Side::Left ? 0 : kTeamSize;
  int mate = base + 1 + static_cast<int>(r * 1e6) % (kTeamSize - 1);
  if (mate == kicker) mate = base + 1 + (mate - base) % (kTeamSize - 1);
  return s.players[static_cast<std::size_t>(mate)].pos;
}

}  // namespace

std::string ObjectId::to_string() const {
  if (is_ball()) return "B";
  return (side == Side::Left ? "L" : "R") + std::to_string(unum);
}

ObjectId ObjectId::parse(const std::string& text) {
  if (text == "B" || text == "ball") return ball();
  if (text.size() >= 2 && (text[0] == 'L' || text[0] == 'R')) {
    int unum = 0;
    try {
      std::size_t used = 0;
      unum = std::stoi(text.substr(1), &used);
      if (used != text.size() - 1) unum = 0;
    } catch (const std::exception&) {
      unum = 0;
    }
    if (unum >= 1 && unum <= kTeamSize) return {text[0] == 'L' ? Side::Left : Side::Right, unum};
  }
  fail(ErrorCategory::Validation, "bad object id '" + text + "' (expected L1..L11, R1..R11 or B)");
}

void KinematicsConfig::validate() const {
  const bool ok = player_decay > 0 && player_decay < 1 && ball_decay > 0 && ball_decay < 1 &&
                  player_speed_max > 0 && ball_speed_max > 0 && player_accel_max > 0 &&
                  ball_accel_max > 0 && episode_len >= 0;
  if (!ok) fail(ErrorCategory::Validation, "invalid kinematics config");
}

Formation default_formation() {
  return {{{-50.0, 0.0},
           {-36.0, -20.0},
           {-38.0, -7.0},
           {-38.0, 7.0},
           {-36.0, 20.0},
           {-22.0, -14.0},
           {-24.0, 0.0},
           {-22.0, 14.0},
           {-3.0, 0.0},
           {-8.0, -18.0},
           {-8.0, 18.0}}};
}

ObjectState step_object(const ObjectState& s, Vec2 accel, const KinematicsConfig& cfg, ObjectKind kind) {
  if (!s.pos.finite() || !s.vel.finite() || !accel.finite() || !std::isfinite(s.body_dir))
    fail(ErrorCategory::Validation, "step_object: non-finite input");
  if (accel.norm() > cfg.accel_max(kind) * (1.0 + 1e-9))
    fail(ErrorCategory::Validation, "step_object: acceleration exceeds accel_max");

  ObjectState out = s;
  const Vec2 v = clamp_norm(s.vel + accel, cfg.speed_max(kind));
  out.pos = s.pos + v;
  out.vel = v * cfg.decay(kind);
  if (std::abs(out.pos.x) > kMaxX) {
    out.pos.x = std::copysign(kMaxX, out.pos.x);
    out.vel.x = 0.0;
  }
  if (std::abs(out.pos.y) > kMaxY) {
    out.pos.y = std::copysign(kMaxY, out.pos.y);
    out.vel.y = 0.0;
  }
  return out;
}

Actions scripted_policy(const WorldState& state, std::uint64_t seed, const SimConfig& cfg) {
  const auto& kin = cfg.kinematics;
  const auto& pol = cfg.policy;
  const Vec2 ball = state.ball.pos;
  const auto cycle = static_cast<std::uint64_t>(state.cycle);
  Actions act;

  const int chaser_left = nearest_player(state, ball, 1, kTeamSize);
  const int chaser_right = nearest_player(state, ball, kTeamSize + 1, kNumPlayers);

  for (int i = 0; i < kNumPlayers; ++i) {
    const auto ui = static_cast<std::uint64_t>(i);
    const ObjectId id = ObjectId::from_player_index(i);
    const ObjectState& me = state.players[static_cast<std::size_t>(i)];
    const Vec2 base = mirrored(cfg.formation[static_cast<std::size_t>(id.unum - 1)], id.side);

    Vec2 target;
    bool chasing = false;
    if (i == chaser_left || i == chaser_right) {
      target = ball + state.ball.vel * 2.0;
      chasing = true;
    } else if (id.unum == 1) {
      target = {base.x * 0.95 + ball.x * 0.05, ball.y * 0.1};
    } else {
      target = clamp_to_pitch({base.x * 0.6 + ball.x * 0.5, base.y * 0.85 + ball.y * 0.25});
      const std::uint64_t block = cycle / static_cast<std::uint64_t>(pol.roam_block);
      if (hashed_unit(seed, ui, block, kRoamTag) < pol.roam_prob) {
        const std::uint64_t h = hash_keys(seed, ui, block, kWaypointTag);
        target = {(unit_from_hash(h) * 2.0 - 1.0) * (kPitchHalfLength - 2.5),
                  (unit_from_hash(splitmix64(h)) * 2.0 - 1.0) * (kPitchHalfWidth - 2.0)};
      }
    }

    const Vec2 to = target - me.pos;
    const double dist = to.norm();
    Vec2 accel = dist > 1e-9 ? to * (kin.player_accel_max * std::min(1.0, dist / 2.0) / dist) : Vec2{};
    const std::uint64_t nh = hash_keys(seed, ui, cycle / kNoiseHold, kNoiseTag);
    accel += Vec2::polar(pol.noise_scale * kin.player_accel_max * unit_from_hash(nh),
                         360.0 * unit_from_hash(splitmix64(nh)));
    act.accel[static_cast<std::size_t>(i)] = clamp_norm(accel, kin.player_accel_max);

    double face = (chasing || dist > 1.0) ? to.angle_deg() : (ball - me.pos).angle_deg();
    const std::uint64_t sblock = cycle / static_cast<std::uint64_t>(pol.scan_block);
    const std::uint64_t sh = hash_keys(seed, ui, sblock, kScanTag);
    if (unit_from_hash(sh) < pol.scan_prob) {
      // Half of the scans glance at a random teammate, the rest at a random heading.
      const std::uint64_t pick = splitmix64(sh);
      if (unit_from_hash(pick) < 0.5) {
        const int base = id.side == Side::Left ? 0 : kTeamSize;
        const int mate = base + static_cast<int>(splitmix64(pick) % kTeamSize);
        face = (state.players[static_cast<std::size_t>(mate)].pos - me.pos).angle_deg();
      } else {
        face = 360.0 * unit_from_hash(splitmix64(pick ^ kScanTag)) - 180.0;
      }
    }
    act.turn_to[static_cast<std::size_t>(i)] = normalize_deg(face);
  }

  int kicker = -1;
  double kick_d = pol.kickable_dist;
  for (int i = 0; i < kNumPlayers; ++i) {
    const double d = distance(state.players[static_cast<std::size_t>(i)].pos, ball);
    if (d <= kick_d) {
      kick_d = d;
      kicker = i;
    }
  }
  if (kicker >= 0) {
    const Vec2 target = kick_target(state, seed, kicker, cycle / 10);
    const Vec2 to = target - ball;
    const double speed = std::clamp(to.norm() * (1.0 - kin.ball_decay) * 1.1, 0.8, kin.ball_speed_max);
    const Vec2 desired = to.norm() > 1e-9 ? to * (speed / to.norm()) : Vec2{speed, 0.0};
    act.kick = clamp_norm(desired - state.ball.vel, kin.ball_accel_max);
    act.kicker = kicker;
  }
  return act;
}

WorldState kickoff_state(const Formation& formation) {
  WorldState s;
  s.cycle = 0;
  for (int i = 0; i < kNumPlayers; ++i) {
    const ObjectId id = ObjectId::from_player_index(i);
    auto& p = s.players[static_cast<std::size_t>(i)];
    p.pos = mirrored(formation[static_cast<std::size_t>(id.unum - 1)], id.side);
    p.body_dir = id.side == Side::Left ? 0.0 : -180.0;
  }
  return s;
}

WorldState advance(const WorldState& state, const Actions& actions, const SimConfig& cfg) {
  WorldState next;
  next.cycle = state.cycle + 1;
  next.ball = step_object(state.ball, actions.kick, cfg.kinematics, ObjectKind::Ball);
  for (std::size_t i = 0; i < state.players.size(); ++i) {
    next.players[i] = step_object(state.players[i], actions.accel[i], cfg.kinematics, ObjectKind::Player);
    next.players[i].body_dir = turn_toward(state.players[i].body_dir, actions.turn_to[i], cfg.policy.max_turn_deg);
  }
  return next;
}

Trajectory run_episode(const SimConfig& cfg, std::uint64_t seed) {
  cfg.kinematics.validate();
  Trajectory traj;
  traj.reserve(static_cast<std::size_t>(cfg.kinematics.episode_len) + 1);
  traj.push_back(kickoff_state(cfg.formation));
  for (int t = 0; t < cfg.kinematics.episode_len; ++t) {
    const WorldState& cur = traj.back();
    traj.push_back(advance(cur, scripted_policy(cur, seed, cfg), cfg));
  }
  return traj;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const std::string& header_comment) {
  if (!header_comment.empty()) os << "# " << header_comment << '\n';
  os << "cycle,side,unum,x,y,vx,vy,body_dir\n";
  auto row = [&os](int cycle, const char* side, int unum, const ObjectState& s) {
    os << cycle << ',' << side << ',' << unum << ',' << csv::fmt(s.pos.x) << ',' << csv::fmt(s.pos.y) << ','
       << csv::fmt(s.vel.x) << ',' << csv::fmt(s.vel.y) << ',' << csv::fmt(s.body_dir) << '\n';
  };
  for (const auto& w : traj) {
    for (int i = 0; i < kNumPlayers; ++i) {
      const ObjectId id = ObjectId::from_player_index(i);
      row(w.cycle, id.side == Side::Left ? "L" : "R", id.unum, w.players[static_cast<std::size_t>(i)]);
    }
    row(w.cycle, "B", 0, w.ball);
  }
}

Trajectory read_trajectory_csv(std::istream& is) {
  csv::read_comment_header(is);
  std::string line;
  if (!csv::next_row(is, line) || line.rfind("cycle,", 0) != 0)
    fail(ErrorCategory::Format, "trajectory csv: missing header row");
  Trajectory traj;
  while (csv::next_row(is, line)) {
    const auto f = csv::split(line);
    if (f.size() != 8) fail(ErrorCategory::Format, "trajectory csv: expected 8 columns: " + line);
    const int cycle = static_cast<int>(csv::to_int(f[0]));
    if (traj.empty() || traj.back().cycle != cycle) {
      traj.emplace_back();
      traj.back().cycle = cycle;
    }
    ObjectState s{{csv::to_double(f[3]), csv::to_double(f[4])},
                  {csv::to_double(f[5]), csv::to_double(f[6])},
                  csv::to_double(f[7])};
    const int unum = static_cast<int>(csv::to_int(f[2]));
    if (unum == 0) {
      traj.back().ball = s;
    } else {
      const ObjectId id{f[1] == "L" ? Side::Left : Side::Right, unum};
      traj.back().players[static_cast<std::size_t>(id.player_index())] = s;
    }
  }
  return traj;
}

}  // namespace ss2d::sim
