#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <vector>

#include "ss2d/geometry.hpp"
#include "ss2d/world_sim.hpp"

namespace ss2d::sensor {

using sim::ObjectId;

/// Field of view and the number of cycles it occupies the visual sensor.
enum class ViewWidth { Narrow, Normal, Wide };

constexpr double view_angle(ViewWidth vw) {
  switch (vw) {
    case ViewWidth::Narrow: return 60.0;
    case ViewWidth::Normal: return 120.0;
    case ViewWidth::Wide: return 180.0;
  }
  return 0.0;
}

constexpr int view_cost(ViewWidth vw) {
  switch (vw) {
    case ViewWidth::Narrow: return 1;
    case ViewWidth::Normal: return 2;
    case ViewWidth::Wide: return 3;
  }
  return 1;
}

const char* to_string(ViewWidth vw);

enum class ViewPolicyKind { Adaptive, Narrow, Normal, Wide };

/// Adaptive picks Narrow when the ball is closer than `narrow_below`, Normal below
/// `normal_below`, Wide otherwise.
struct ViewPolicy {
  ViewPolicyKind kind = ViewPolicyKind::Adaptive;
  double narrow_below = 15.0;
  double normal_below = 30.0;
};

ViewPolicyKind parse_view_policy(const std::string& name);
const char* to_string(ViewPolicyKind k);

struct NoiseConfig {
  double dist_qstep = 0.1;
  double dist_outstep = 0.1;
  double visible_distance = 60.0;
  ViewPolicy view_policy;

  void validate() const;
};

struct Pose {
  Vec2 pos;
  double body_dir = 0.0;
};

struct RawSighting {
  ObjectId object;
  double quantized_dist = 0.0;
  int angle_deg = 0;
};

struct Observation {
  int cycle = 0;
  ObjectId observer;
  Pose pose;
  ViewWidth view_width = ViewWidth::Normal;
  /// False on cycles where the sensor is still busy; sightings is then empty.
  bool sensed = true;
  std::vector<RawSighting> sightings;
};

/// q * round(v / q), ties away from zero.
double quantize(double v, double q);

/// Log-domain distance quantizer: quantize(exp(quantize(ln d, qstep)), outstep).
double observe_distance(double d, const NoiseConfig& cfg);

/// Rounds to whole degrees in [-180, 179].
int observe_angle(double a);

double relative_bearing(const Pose& observer, Vec2 object);

bool visible(const Pose& observer, Vec2 object, ViewWidth vw, const NoiseConfig& cfg);

struct ViewDecision {
  ViewWidth width = ViewWidth::Normal;
  bool sees = false;
};

/// Per-agent sensing clock. After a sighting with width w the sensor is busy for
/// view_cost(w) - 1 cycles.
class ViewScheduler {
 public:
  explicit ViewScheduler(ViewPolicy policy) : policy_(policy) {}

  /// Must be called once per cycle with increasing cycle numbers.
  ViewDecision step(int cycle, double ball_distance);

 private:
  ViewPolicy policy_;
  int next_sense_ = 0;
  ViewWidth width_ = ViewWidth::Normal;
};

/// Sensing decision for a constant-width policy; pure in cycle.
ViewDecision view_schedule(int cycle, ViewWidth constant);

ViewWidth choose_width(const ViewPolicy& policy, double ball_distance);

Observation sense(const sim::WorldState& world, ObjectId observer, ViewWidth vw, const NoiseConfig& cfg);

/// Position from one sighting using the quantized distance as-is.
Vec2 naive_position(const RawSighting& s, const Pose& observer);

using PositionEstimator = std::function<Vec2(const RawSighting&, const Pose&)>;

struct Track {
  Vec2 est_pos;
  Vec2 est_vel;
  int pos_count = 0;
  bool initialized = false;
};

inline constexpr int kNumObjects = sim::kNumPlayers + 1;

inline constexpr std::size_t track_index(ObjectId id) {
  return id.is_ball() ? static_cast<std::size_t>(sim::kNumPlayers) : static_cast<std::size_t>(id.player_index());
}

/// One agent's tracked estimate of every object.
struct Belief {
  int cycle = -1;
  std::array<Track, kNumObjects> tracks{};

  const Track& at(ObjectId id) const { return tracks[track_index(id)]; }
  Track& at(ObjectId id) { return tracks[track_index(id)]; }

  /// Marks a position as known at `cycle` without a sighting (kickoff formation).
  void seed(ObjectId id, Vec2 pos, int at_cycle);
};

/// Sighted objects get a fresh estimate and pos_count 0; the rest age by one cycle.
Belief update_belief(const Belief& b, const Observation& obs, const PositionEstimator& estimator);

/// Rows: cycle,observer,object,quantized_dist,angle_deg,view_width,seen_flag, one per
/// (cycle, tracked object); unseen rows leave distance and angle empty.
void write_observation_log(std::ostream& os, const std::vector<Observation>& observations,
                           const std::vector<ObjectId>& objects, const std::string& header_comment);

}  // namespace ss2d::sensor
