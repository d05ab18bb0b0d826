#include "ss2d/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <mutex>
#include <set>
#include <thread>

#include "ss2d/csv.hpp"
#include "ss2d/denoise.hpp"
#include "ss2d/error.hpp"

namespace ss2d::dataset {

BeliefEstimator parse_belief_estimator(const std::string& name) {
  if (name == "helios") return BeliefEstimator::Helios;
  if (name == "naive") return BeliefEstimator::Naive;
  fail(ErrorCategory::Validation, "unknown belief estimator '" + name + "' (expected helios or naive)");
}

const char* to_string(BeliefEstimator e) { return e == BeliefEstimator::Helios ? "helios" : "naive"; }

std::vector<DatasetRecord> generate_episode(const DatasetConfig& cfg, int episode, std::uint64_t seed) {
  cfg.noise.validate();
  if (cfg.observer == cfg.object) fail(ErrorCategory::Validation, "observer and object must differ");
  if (cfg.observer.is_ball()) fail(ErrorCategory::Validation, "the ball cannot observe");

  const sim::Trajectory traj = sim::run_episode(cfg.sim, seed);
  const auto estimator = cfg.estimator == BeliefEstimator::Helios ? denoise::make_helios_estimator(cfg.noise)
                                                                  : denoise::make_naive_estimator();
  const auto naive = denoise::make_naive_estimator();

  // The kickoff layout is known to every agent before the first cycle.
  sensor::Belief belief;
  for (int i = 0; i < sim::kNumPlayers; ++i) {
    const ObjectId id = ObjectId::from_player_index(i);
    belief.seed(id, traj.front().object(id).pos, -1);
  }
  belief.seed(ObjectId::ball(), traj.front().ball.pos, -1);
  sensor::Belief naive_belief = belief;
  sensor::ViewScheduler scheduler(cfg.noise.view_policy);

  std::vector<DatasetRecord> out;
  const int len = cfg.sim.kinematics.episode_len;
  out.reserve(static_cast<std::size_t>(len));
  for (int t = 0; t < len; ++t) {
    const sim::WorldState& world = traj[static_cast<std::size_t>(t)];
    const auto& me = world.object(cfg.observer);
    const auto view = scheduler.step(t, distance(me.pos, world.ball.pos));
    sensor::Observation obs;
    if (view.sees) {
      obs = sensor::sense(world, cfg.observer, view.width, cfg.noise);
    } else {
      obs.cycle = t;
      obs.observer = cfg.observer;
      obs.pose = {me.pos, me.body_dir};
      obs.view_width = view.width;
      obs.sensed = false;
    }
    belief = sensor::update_belief(belief, obs, estimator);
    naive_belief = sensor::update_belief(naive_belief, obs, naive);

    const auto& track = belief.at(cfg.object);
    const auto& truth = world.object(cfg.object);
    DatasetRecord r;
    r.episode = episode;
    r.cycle = t;
    r.observer = cfg.observer;
    r.object = cfg.object;
    r.seen = track.pos_count == 0;
    r.est_pos = track.est_pos;
    r.est_vel = track.est_vel;
    r.pos_count = track.pos_count;
    r.observer_pos = me.pos;
    r.observer_body = me.body_dir;
    r.true_pos = truth.pos;
    r.true_vel = truth.vel;
    r.naive_pos = naive_belief.at(cfg.object).est_pos;
    out.push_back(r);
  }
  return out;
}

std::vector<DatasetRecord> generate_dataset(int n_episodes, std::uint64_t seed, const DatasetConfig& cfg, int jobs) {
  if (n_episodes < 1) fail(ErrorCategory::Validation, "need at least one episode");
  std::vector<std::vector<DatasetRecord>> per_episode(static_cast<std::size_t>(n_episodes));
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (int i = next++; i < n_episodes; i = next++) {
      try {
        per_episode[static_cast<std::size_t>(i)] = generate_episode(cfg, i, seed + static_cast<std::uint64_t>(i));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const int n_threads = std::clamp(jobs, 1, n_episodes);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int i = 0; i < n_threads; ++i) threads.emplace_back(worker);
    for (auto& th : threads) th.join();
  }
  if (error) std::rethrow_exception(error);

  std::vector<DatasetRecord> out;
  for (auto& ep : per_episode) out.insert(out.end(), ep.begin(), ep.end());
  return out;
}

void write_dataset_csv(std::ostream& os, const std::vector<DatasetRecord>& records, const std::string& header_comment) {
  if (!header_comment.empty()) os << "# " << header_comment << '\n';
  os << kDatasetColumns << '\n';
  using csv::fmt;
  for (const auto& r : records) {
    os << r.episode << ',' << r.cycle << ',' << r.observer.to_string() << ',' << r.object.to_string() << ','
       << (r.seen ? 1 : 0) << ',' << fmt(r.est_pos.x) << ',' << fmt(r.est_pos.y) << ',' << fmt(r.est_vel.x) << ','
       << fmt(r.est_vel.y) << ',' << r.pos_count << ',' << fmt(r.observer_pos.x) << ',' << fmt(r.observer_pos.y)
       << ',' << fmt(r.observer_body) << ',' << fmt(r.true_pos.x) << ',' << fmt(r.true_pos.y) << ','
       << fmt(r.true_vel.x) << ',' << fmt(r.true_vel.y) << ',' << fmt(r.naive_pos.x) << ',' << fmt(r.naive_pos.y)
       << '\n';
  }
}

std::vector<DatasetRecord> read_dataset_csv(std::istream& is) {
  csv::read_comment_header(is);
  std::string line;
  if (!csv::next_row(is, line) || line != kDatasetColumns)
    fail(ErrorCategory::Format, "dataset csv: header row does not match expected columns");
  std::vector<DatasetRecord> out;
  while (csv::next_row(is, line)) {
    const auto f = csv::split(line);
    if (f.size() != 19) fail(ErrorCategory::Format, "dataset csv: expected 19 columns: " + line);
    DatasetRecord r;
    r.episode = static_cast<int>(csv::to_int(f[0]));
    r.cycle = static_cast<int>(csv::to_int(f[1]));
    r.observer = ObjectId::parse(std::string(f[2]));
    r.object = ObjectId::parse(std::string(f[3]));
    r.seen = csv::to_int(f[4]) != 0;
    r.est_pos = {csv::to_double(f[5]), csv::to_double(f[6])};
    r.est_vel = {csv::to_double(f[7]), csv::to_double(f[8])};
    r.pos_count = static_cast<int>(csv::to_int(f[9]));
    r.observer_pos = {csv::to_double(f[10]), csv::to_double(f[11])};
    r.observer_body = csv::to_double(f[12]);
    r.true_pos = {csv::to_double(f[13]), csv::to_double(f[14])};
    r.true_vel = {csv::to_double(f[15]), csv::to_double(f[16])};
    r.naive_pos = {csv::to_double(f[17]), csv::to_double(f[18])};
    out.push_back(r);
  }
  return out;
}

void save_dataset(const std::string& path, const std::vector<DatasetRecord>& records, const std::string& header_comment) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorCategory::Io, "cannot write dataset " + path);
  write_dataset_csv(os, records, header_comment);
  if (!os) fail(ErrorCategory::Io, "failed writing dataset " + path);
}

std::vector<DatasetRecord> load_dataset(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCategory::Io, "cannot open dataset " + path);
  try {
    return read_dataset_csv(is);
  } catch (const Error& e) {
    fail(e.category(), path + ": " + e.what());
  }
}

std::vector<std::size_t> extract_windows(const std::vector<DatasetRecord>& records, int warmup, int window) {
  std::vector<std::size_t> out;
  const auto w = static_cast<std::size_t>(window);
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (i > 0) {
      const auto& a = records[i - 1];
      const auto& b = records[i];
      if (b.episode < a.episode || (b.episode == a.episode && b.cycle <= a.cycle))
        fail(ErrorCategory::Validation, "extract_windows: records not sorted by (episode, cycle) at row " +
                                            std::to_string(i));
    }
    if (records[i].cycle < warmup || i + 1 < w) continue;
    bool contiguous = true;
    for (std::size_t k = 1; k < w; ++k) {
      const auto& prev = records[i - k];
      if (prev.episode != records[i].episode || prev.cycle != records[i].cycle - static_cast<int>(k)) {
        contiguous = false;
        break;
      }
    }
    if (contiguous) out.push_back(i);
  }
  return out;
}

Split split_episodes(const std::vector<DatasetRecord>& records, double val_fraction, std::uint64_t seed) {
  if (!(val_fraction > 0 && val_fraction < 1)) fail(ErrorCategory::Validation, "val_fraction must be in (0, 1)");
  std::set<int> ids;
  for (const auto& r : records) ids.insert(r.episode);
  if (ids.size() < 2) fail(ErrorCategory::Validation, "split needs at least 2 episodes");
  std::vector<int> order(ids.begin(), ids.end());
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  auto n_val = static_cast<std::size_t>(std::llround(static_cast<double>(order.size()) * val_fraction));
  n_val = std::clamp<std::size_t>(n_val, 1, order.size() - 1);
  Split s;
  s.val_episodes.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  s.train_episodes.assign(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  std::sort(s.val_episodes.begin(), s.val_episodes.end());
  std::sort(s.train_episodes.begin(), s.train_episodes.end());
  return s;
}

std::vector<DatasetRecord> select_episodes(const std::vector<DatasetRecord>& records, const std::vector<int>& episodes) {
  const std::set<int> keep(episodes.begin(), episodes.end());
  std::vector<DatasetRecord> out;
  for (const auto& r : records) {
    if (keep.count(r.episode)) out.push_back(r);
  }
  return out;
}

}  // namespace ss2d::dataset
