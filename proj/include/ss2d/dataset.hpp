#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ss2d/sensor.hpp"
#include "ss2d/world_sim.hpp"

namespace ss2d::dataset {

using sim::ObjectId;

/// One cycle of one (observer, object) pair. `est_*` come from the observer's Belief
/// after the cycle's update; `true_*` from the trajectory at the same cycle;
/// `naive_*` is the last-seen position rebuilt from the raw quantized distance.
struct DatasetRecord {
  int episode = 0;
  int cycle = 0;
  ObjectId observer;
  ObjectId object;
  bool seen = false;
  Vec2 est_pos;
  Vec2 est_vel;
  int pos_count = 0;
  Vec2 observer_pos;
  double observer_body = 0.0;
  Vec2 true_pos;
  Vec2 true_vel;
  Vec2 naive_pos;
};

enum class BeliefEstimator { Helios, Naive };

BeliefEstimator parse_belief_estimator(const std::string& name);
const char* to_string(BeliefEstimator e);

struct DatasetConfig {
  sim::SimConfig sim;
  sensor::NoiseConfig noise;
  ObjectId observer{sim::Side::Left, 9};
  ObjectId object{sim::Side::Left, 5};
  int warmup = 5;
  BeliefEstimator estimator = BeliefEstimator::Helios;
};

/// Records for cycles 0..episode_len-1 of one episode.
std::vector<DatasetRecord> generate_episode(const DatasetConfig& cfg, int episode, std::uint64_t seed);

/// Episode i uses seed + i. Output is ordered by episode regardless of `jobs`.
std::vector<DatasetRecord> generate_dataset(int n_episodes, std::uint64_t seed, const DatasetConfig& cfg, int jobs = 1);

inline constexpr const char* kDatasetColumns =
    "episode,cycle,observer,object,seen,est_x,est_y,est_vx,est_vy,pos_count,obs_x,obs_y,obs_body,"
    "true_x,true_y,true_vx,true_vy,naive_x,naive_y";

void write_dataset_csv(std::ostream& os, const std::vector<DatasetRecord>& records, const std::string& header_comment);
std::vector<DatasetRecord> read_dataset_csv(std::istream& is);

void save_dataset(const std::string& path, const std::vector<DatasetRecord>& records, const std::string& header_comment);
std::vector<DatasetRecord> load_dataset(const std::string& path);

/// Indices of records that end a full window: cycle >= warmup and the previous
/// `window - 1` records are consecutive cycles of the same episode.
/// Throws when records are not sorted by (episode, cycle).
std::vector<std::size_t> extract_windows(const std::vector<DatasetRecord>& records, int warmup = 5, int window = 5);

struct Split {
  std::vector<int> train_episodes;
  std::vector<int> val_episodes;
};

/// Episode-granularity split; round(n * val_fraction) episodes (at least 1) go to validation.
Split split_episodes(const std::vector<DatasetRecord>& records, double val_fraction, std::uint64_t seed);

std::vector<DatasetRecord> select_episodes(const std::vector<DatasetRecord>& records, const std::vector<int>& episodes);

}  // namespace ss2d::dataset
