#include "ss2d/sensor.hpp"

#include <cmath>
#include <ostream>

#include "ss2d/csv.hpp"
#include "ss2d/error.hpp"

namespace ss2d::sensor {

const char* to_string(ViewWidth vw) {
  switch (vw) {
    case ViewWidth::Narrow: return "narrow";
    case ViewWidth::Normal: return "normal";
    case ViewWidth::Wide: return "wide";
  }
  return "?";
}

ViewPolicyKind parse_view_policy(const std::string& name) {
  if (name == "adaptive") return ViewPolicyKind::Adaptive;
  if (name == "narrow") return ViewPolicyKind::Narrow;
  if (name == "normal") return ViewPolicyKind::Normal;
  if (name == "wide") return ViewPolicyKind::Wide;
  fail(ErrorCategory::Validation, "unknown view policy '" + name + "'");
}

const char* to_string(ViewPolicyKind k) {
  switch (k) {
    case ViewPolicyKind::Adaptive: return "adaptive";
    case ViewPolicyKind::Narrow: return "narrow";
    case ViewPolicyKind::Normal: return "normal";
    case ViewPolicyKind::Wide: return "wide";
  }
  return "?";
}

void NoiseConfig::validate() const {
  if (!(dist_qstep > 0) || !(dist_outstep > 0) || !(visible_distance > 0))
    fail(ErrorCategory::Validation, "noise config steps and visible_distance must be positive");
}

double quantize(double v, double q) {
  if (!(q > 0)) fail(ErrorCategory::Validation, "quantize: step must be positive");
  if (!std::isfinite(v)) fail(ErrorCategory::Validation, "quantize: non-finite value");
  const double r = std::abs(v / q);
  double n = std::floor(r);
  // Decimal ties such as 0.35/0.1 land a few ulps below .5 in binary.
  if (r - n >= 0.5 - 1e-9 * std::max(1.0, r)) n += 1.0;
  return std::copysign(n * q, v);
}

double observe_distance(double d, const NoiseConfig& cfg) {
  if (!(d >= 0)) fail(ErrorCategory::Validation, "observe_distance: negative distance");
  if (d == 0.0) return 0.0;
  return quantize(std::exp(quantize(std::log(d), cfg.dist_qstep)), cfg.dist_outstep);
}

int observe_angle(double a) {
  int r = static_cast<int>(quantize(normalize_deg(a), 1.0));
  if (r >= 180) r -= 360;
  if (r < -180) r += 360;
  return r;
}

double relative_bearing(const Pose& observer, Vec2 object) {
  return normalize_deg((object - observer.pos).angle_deg() - observer.body_dir);
}

bool visible(const Pose& observer, Vec2 object, ViewWidth vw, const NoiseConfig& cfg) {
  if (distance(observer.pos, object) > cfg.visible_distance) return false;
  return std::abs(relative_bearing(observer, object)) <= view_angle(vw) / 2.0;
}

ViewWidth choose_width(const ViewPolicy& policy, double ball_distance) {
  switch (policy.kind) {
    case ViewPolicyKind::Narrow: return ViewWidth::Narrow;
    case ViewPolicyKind::Normal: return ViewWidth::Normal;
    case ViewPolicyKind::Wide: return ViewWidth::Wide;
    case ViewPolicyKind::Adaptive: break;
  }
  if (ball_distance < policy.narrow_below) return ViewWidth::Narrow;
  if (ball_distance < policy.normal_below) return ViewWidth::Normal;
  return ViewWidth::Wide;
}

ViewDecision ViewScheduler::step(int cycle, double ball_distance) {
  if (cycle < next_sense_) return {width_, false};
  width_ = choose_width(policy_, ball_distance);
  next_sense_ = cycle + view_cost(width_);
  return {width_, true};
}

ViewDecision view_schedule(int cycle, ViewWidth constant) {
  return {constant, cycle % view_cost(constant) == 0};
}

Observation sense(const sim::WorldState& world, ObjectId observer, ViewWidth vw, const NoiseConfig& cfg) {
  const auto& me = world.object(observer);
  Observation obs;
  obs.cycle = world.cycle;
  obs.observer = observer;
  obs.pose = {me.pos, me.body_dir};
  obs.view_width = vw;

  auto consider = [&](ObjectId id, Vec2 pos) {
    if (!visible(obs.pose, pos, vw, cfg)) return;
    obs.sightings.push_back(
        {id, observe_distance(distance(obs.pose.pos, pos), cfg), observe_angle(relative_bearing(obs.pose, pos))});
  };
  for (int i = 0; i < sim::kNumPlayers; ++i) {
    const ObjectId id = ObjectId::from_player_index(i);
    if (id == observer) continue;
    consider(id, world.players[static_cast<std::size_t>(i)].pos);
  }
  consider(ObjectId::ball(), world.ball.pos);
  return obs;
}

Vec2 naive_position(const RawSighting& s, const Pose& observer) {
  return observer.pos + Vec2::polar(s.quantized_dist, observer.body_dir + s.angle_deg);
}

void Belief::seed(ObjectId id, Vec2 pos, int at_cycle) {
  auto& t = at(id);
  t.est_pos = pos;
  t.est_vel = {};
  t.pos_count = 0;
  t.initialized = true;
  cycle = at_cycle;
}

Belief update_belief(const Belief& b, const Observation& obs, const PositionEstimator& estimator) {
  if (b.cycle >= 0 && obs.cycle != b.cycle + 1)
    fail(ErrorCategory::Validation, "update_belief: observation cycle " + std::to_string(obs.cycle) +
                                        " does not follow belief cycle " + std::to_string(b.cycle));
  Belief out = b;
  out.cycle = obs.cycle;
  std::array<bool, kNumObjects> seen{};
  for (const auto& s : obs.sightings) {
    const std::size_t idx = track_index(s.object);
    seen[idx] = true;
    Track& t = out.tracks[idx];
    const Vec2 pos = estimator(s, obs.pose);
    if (t.initialized) {
      t.est_vel = (pos - t.est_pos) / static_cast<double>(t.pos_count + 1);
    } else {
      t.est_vel = {};
      t.initialized = true;
    }
    t.est_pos = pos;
    t.pos_count = 0;
  }
  for (std::size_t i = 0; i < out.tracks.size(); ++i) {
    if (!seen[i] && out.tracks[i].initialized) ++out.tracks[i].pos_count;
  }
  return out;
}

void write_observation_log(std::ostream& os, const std::vector<Observation>& observations,
                           const std::vector<ObjectId>& objects, const std::string& header_comment) {
  if (!header_comment.empty()) os << "# " << header_comment << '\n';
  os << "cycle,observer,object,quantized_dist,angle_deg,view_width,seen_flag\n";
  for (const auto& obs : observations) {
    for (const ObjectId id : objects) {
      const RawSighting* hit = nullptr;
      for (const auto& s : obs.sightings) {
        if (s.object == id) hit = &s;
      }
      os << obs.cycle << ',' << obs.observer.to_string() << ',' << id.to_string() << ',';
      if (hit) {
        os << csv::fmt(hit->quantized_dist) << ',' << hit->angle_deg;
      } else {
        os << ',';
      }
      os << ',' << (obs.sensed ? to_string(obs.view_width) : "none") << ',' << (hit ? 1 : 0) << '\n';
    }
  }
}

}  // namespace ss2d::sensor
