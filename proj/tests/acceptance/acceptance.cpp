// Runs acceptance criteria 1-8 and prints one [PASS]/[FAIL] line per criterion.
// Exit status is nonzero when a criterion fails that is not listed in --known-fail.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "oracles/quantizer_cells.hpp"
#include "ss2d/denoise.hpp"
#include "ss2d/nn/grad_check.hpp"
#include "ss2d/pipeline.hpp"

using namespace ss2d;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fixed(double v, int digits = 3) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

double rel_gap(double better, double worse) { return (worse - better) / worse; }

// Criteria 1 and 2 share one desk-scale dataset and the seed-1 models.
struct DeskRun {
  Outcome ordering;
  Outcome heatmap;
};

DeskRun desk_scale(int episodes, int epochs, double lr, int n_seeds) {
  const auto t0 = Clock::now();
  config::RunConfig cfg;
  cfg.episodes = episodes;
  cfg.train.epochs = epochs;
  cfg.train.learning_rate = lr;

  const auto records = dataset::generate_dataset(cfg.episodes, cfg.data_seed, cfg.data, 1);
  const auto data = pipeline::prepare(records, cfg);
  auto registry = eval::classical_registry(cfg.data.sim.kinematics);
  const auto& vr = data.val_records;
  const auto& vw = data.val_windows;
  const double last_seen = eval::rmse(registry.get("last_seen")(vr, vw), vr, vw, 2);
  std::cout << "  desk scale: " << episodes << " episodes, " << vw.size() << " validation windows, last_seen rmse "
            << fixed(last_seen) << '\n';

  int ok = 0;
  std::ostringstream per_seed;
  std::shared_ptr<const nn::Network> dnn1, lstm1;
  for (int s = 1; s <= n_seeds; ++s) {
    cfg.train.seed = static_cast<std::uint64_t>(s);
    auto dnn = std::make_shared<const nn::Network>(pipeline::train(cfg, models::ModelKind::Dnn, data).model);
    auto lstm = std::make_shared<const nn::Network>(pipeline::train(cfg, models::ModelKind::Lstm, data).model);
    const double r_dnn = eval::rmse(pipeline::model_estimator(dnn)(vr, vw), vr, vw, 2);
    const double r_lstm = eval::rmse(pipeline::model_estimator(lstm)(vr, vw), vr, vw, 2);
    const double g1 = rel_gap(r_lstm, r_dnn), g2 = rel_gap(r_dnn, last_seen);
    const bool seed_ok = g1 >= 0.05 && g2 >= 0.05;
    ok += seed_ok;
    std::cout << "  seed " << s << ": lstm " << fixed(r_lstm) << " dnn " << fixed(r_dnn) << " last_seen "
              << fixed(last_seen) << " gaps " << fixed(100 * g1, 1) << "% / " << fixed(100 * g2, 1) << "% "
              << (seed_ok ? "ok" : "short") << " (" << fixed(seconds_since(t0), 0) << " s)\n";
    per_seed << (s > 1 ? "," : "") << fixed(100 * g1, 1) << "/" << fixed(100 * g2, 1);
    if (s == 1) {
      dnn1 = dnn;
      lstm1 = lstm;
    }
  }
  const double elapsed = seconds_since(t0);
  DeskRun out;
  out.ordering.pass = 2 * ok > n_seeds && elapsed < 1800.0;
  out.ordering.detail = std::to_string(ok) + "/" + std::to_string(n_seeds) +
                        " seeds with lstm<dnn<last_seen at >=5% gaps (lstm-vs-dnn/dnn-vs-last_seen %: " +
                        per_seed.str() + "), " + fixed(elapsed, 0) + " s of 1800 s";

  registry.add("dnn", pipeline::model_estimator(dnn1));
  registry.add("lstm", pipeline::model_estimator(lstm1));
  const auto ev = pipeline::evaluate(vr, vw, registry, {"last_seen", "dnn", "lstm"}, cfg, 1);
  const eval::ComparisonGrid* lstm_vs_last = nullptr;
  for (const auto& c : ev.comparisons)
    if (c.name_a == "lstm" && c.name_b == "last_seen") lstm_vs_last = &c;
  if (ev.comparisons.size() != 3 || !lstm_vs_last) {
    out.heatmap.detail = "expected three comparison grids, got " + std::to_string(ev.comparisons.size());
    return out;
  }
  const auto share = eval::count_winners(*lstm_vs_last, 2);
  bool has_insufficient = false;
  for (const auto& c : ev.comparisons) has_insufficient = has_insufficient || eval::count_winners(c).insufficient > 0;
  out.heatmap.pass = share.share_a() >= 0.6 && has_insufficient;
  out.heatmap.detail = "lstm wins " + std::to_string(share.a) + " of " + std::to_string(share.a + share.b) +
                       " populated pos_count>=2 cells vs last_seen (" + fixed(100 * share.share_a(), 1) +
                       "%, need 60%); insufficient cells present: " + (has_insufficient ? "yes" : "no");
  return out;
}

Outcome inversion_oracle() {
  const auto t0 = Clock::now();
  const sensor::NoiseConfig cfg;
  const auto cells = oracle::scan_cells(cfg);
  double worst = 0.0;
  int mid_fail = 0, compared = 0;
  for (const auto& [key, cell] : cells) {
    const double dq = static_cast<double>(key) * cfg.dist_outstep;
    const auto iv = denoise::invert_distance_quantization(dq, cfg);
    worst = std::max({worst, std::abs(iv.lo - (key == 0 ? 0.0 : cell.lo)), std::abs(iv.hi - cell.hi)});
    if (oracle::cell_key(sensor::observe_distance(iv.mid, cfg), cfg) != key) ++mid_fail;
    ++compared;
  }
  const double elapsed = seconds_since(t0);
  return {worst <= 2e-3 && mid_fail == 0 && elapsed < 10.0,
          std::to_string(compared) + " attainable outputs, worst endpoint gap " + fixed(worst * 1000, 3) +
              " mm (<= 2 mm), midpoint mismatches " + std::to_string(mid_fail) + ", " + fixed(elapsed, 2) +
              " s (< 10 s)"};
}

Outcome distance_noise() {
  const sensor::NoiseConfig cfg;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 60.0);
  std::vector<double> sum(15, 0.0);
  std::vector<long long> n(15, 0);
  for (int i = 0; i < 100000; ++i) {
    double d = u(rng);
    while (d == 0.0) d = u(rng);
    const auto b = std::min<std::size_t>(static_cast<std::size_t>(d / 4.0), 14);
    sum[b] += std::abs(d - sensor::observe_distance(d, cfg));
    ++n[b];
  }
  int inversions = 0;
  std::ostringstream means;
  for (std::size_t b = 0; b < sum.size(); ++b) {
    means << (b ? " " : "") << fixed(sum[b] / static_cast<double>(n[b]), 3);
    if (b > 0 && sum[b] / n[b] < sum[b - 1] / n[b - 1]) ++inversions;
  }
  return {inversions <= 1, "bin means [" + means.str() + "], inversions " + std::to_string(inversions) + " (<= 1)"};
}

Outcome helios_dominance() {
  const sensor::NoiseConfig cfg;
  const auto helios = denoise::make_helios_estimator(cfg);
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> ux(-kMaxX, kMaxX), uy(-kMaxY, kMaxY), ua(-180.0, 180.0), ud(0.0, 60.0);
  double e_helios = 0.0, e_naive = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const sensor::Pose pose{{ux(rng), uy(rng)}, ua(rng)};
    double d = ud(rng);
    while (d == 0.0) d = ud(rng);
    const Vec2 obj = pose.pos + Vec2::polar(d, ua(rng));
    const sensor::RawSighting s{{}, sensor::observe_distance(d, cfg),
                                sensor::observe_angle(sensor::relative_bearing(pose, obj))};
    e_helios += distance(helios(s, pose), obj);
    e_naive += distance(denoise::naive_estimate(s, pose), obj);
  }
  e_helios /= n;
  e_naive /= n;
  const double gain = rel_gap(e_helios, e_naive);
  return {gain >= 0.01, "mean error helios " + fixed(e_helios, 4) + " m vs naive " + fixed(e_naive, 4) + " m, " +
                            fixed(100 * gain, 2) + "% better (>= 1%)"};
}

Outcome gradients() {
  const auto checks = nn::standard_grad_checks(1, 1e-4, 1e-4);
  const auto bad = nn::corrupted_grad_check(1, 1e-4, 1e-4);
  bool ok = !bad.report.passed;
  std::ostringstream d;
  for (const auto& c : checks) {
    ok = ok && c.report.passed && c.parameters <= 1000;
    d << c.name << " (" << c.parameters << " params) " << c.report.max_rel_error << "; ";
  }
  d << "corrupted control " << (bad.report.passed ? "passed (wrong)" : "rejected") << " at " << bad.report.max_rel_error;
  return {ok, d.str()};
}

Outcome bookkeeping() {
  const sim::ObjectId observer{sim::Side::Left, 9}, target{sim::Side::Left, 5};
  const auto pos = [](const sensor::RawSighting& s, const sensor::Pose& p) { return sensor::naive_position(s, p); };
  int mismatches = 0;
  for (unsigned mask = 0; mask < (1u << 10); ++mask) {
    sensor::Belief b;
    b.seed(target, {0, 0}, -1);
    int since = 0;
    for (int c = 0; c < 10; ++c) {
      sensor::Observation obs;
      obs.cycle = c;
      obs.observer = observer;
      const bool hit = (mask >> c) & 1u;
      if (hit) obs.sightings.push_back({target, 10.0, 0});
      b = sensor::update_belief(b, obs, pos);
      since = hit ? 0 : since + 1;
      mismatches += b.at(target).pos_count != since;
    }
  }
  bool schedule_ok = true;
  for (const auto [vw, every] : {std::pair{sensor::ViewWidth::Wide, 3}, {sensor::ViewWidth::Normal, 2},
                                 {sensor::ViewWidth::Narrow, 1}}) {
    for (int c = 0; c < 60; ++c) schedule_ok = schedule_ok && sensor::view_schedule(c, vw).sees == (c % every == 0);
  }
  return {mismatches == 0 && schedule_ok, "1024 sequences x 10 cycles, " + std::to_string(mismatches) +
                                              " pos_count mismatches; wide/normal/narrow schedules " +
                                              (schedule_ok ? "match {0,3,6..},{0,2,4..},{0,1,2..}" : "wrong")};
}

int run_command(const std::string& cmd) {
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

Outcome reproducibility(const std::string& cli, int episodes, int epochs) {
  const fs::path root = fs::temp_directory_path() / "ss2d_acceptance_repro";
  fs::remove_all(root);
  const std::string args = " --jobs 1 --seed 11 --episodes " + std::to_string(episodes) + " --epochs " +
                           std::to_string(epochs) + " --set sim.episode_len=1000 > /dev/null 2>&1";
  for (const char* run : {"a", "b"}) {
    if (run_command(cli + " pipeline --out " + (root / run).string() + args) != 0)
      return {false, std::string("pipeline run ") + run + " failed"};
  }
  std::vector<fs::path> files{"dataset.csv", "dnn.ckpt", "lstm.ckpt"};
  for (const auto& e : fs::directory_iterator(root / "a" / "grids"))
    if (e.path().extension() == ".csv") files.push_back(fs::path("grids") / e.path().filename());
  int differing = 0;
  std::string first_diff;
  for (const auto& f : files) {
    const std::string a = slurp(root / "a" / f), b = slurp(root / "b" / f);
    if (a.empty() || a != b) {
      ++differing;
      if (first_diff.empty()) first_diff = f.string();
    }
  }
  fs::remove_all(root);
  return {differing == 0, std::to_string(files.size()) + " artifacts compared byte for byte, " +
                              std::to_string(differing) + " differ" + (first_diff.empty() ? "" : " (" + first_diff + ")")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("Acceptance checks");
  std::vector<int> only;
  std::vector<int> known_fail;
  int episodes = 40, epochs = 8, seeds = 3;
  double lr = 3e-4;
  std::string cli = SS2D_CLI_PATH;
  app.add_option("--only", only, "Criteria to run (default all)")->delimiter(',');
  app.add_option("--known-fail", known_fail, "Criteria whose failure does not fail the run")->delimiter(',');
  app.add_option("--episodes", episodes, "Desk-scale episodes")->capture_default_str();
  app.add_option("--epochs", epochs, "Desk-scale training epochs")->capture_default_str();
  app.add_option("--lr", lr, "Desk-scale learning rate")->capture_default_str();
  app.add_option("--seeds", seeds, "Training seeds for criterion 1")->capture_default_str();
  app.add_option("--cli", cli, "Path to the ss2d binary")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  const std::set<int> selected(only.begin(), only.end());
  const std::set<int> allowed(known_fail.begin(), known_fail.end());
  const auto wanted = [&](int c) { return selected.empty() || selected.count(c); };

  std::map<int, std::pair<std::string, Outcome>> results;
  const auto record = [&](int c, const std::string& name, const Outcome& o) {
    results[c] = {name, o};
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << c << ' ' << name << ": " << o.detail << std::endl;
  };

  const std::vector<std::tuple<int, std::string, std::function<Outcome()>>> quick = {
      {3, "quantizer inversion oracle", inversion_oracle},
      {4, "distance-proportional noise", distance_noise},
      {5, "helios beats raw sighting", helios_dominance},
      {6, "gradient correctness", gradients},
      {7, "pos_count bookkeeping and view schedule", bookkeeping},
      {8, "end-to-end reproducibility", [&] { return reproducibility(cli, 4, 1); }},
  };
  for (const auto& [c, name, fn] : quick) {
    if (!wanted(c)) continue;
    try {
      record(c, name, fn());
    } catch (const std::exception& e) {
      record(c, name, {false, std::string("threw: ") + e.what()});
    }
  }
  if (wanted(1) || wanted(2)) {
    try {
      const auto desk = desk_scale(episodes, epochs, lr, seeds);
      if (wanted(1)) record(1, "method ordering", desk.ordering);
      if (wanted(2)) record(2, "heatmap reproduction", desk.heatmap);
    } catch (const std::exception& e) {
      if (wanted(1)) record(1, "method ordering", {false, std::string("threw: ") + e.what()});
      if (wanted(2)) record(2, "heatmap reproduction", {false, std::string("threw: ") + e.what()});
    }
  }

  std::cout << "\nsummary:\n";
  int unexpected = 0;
  for (const auto& [c, entry] : results) {
    const bool tolerated = !entry.second.pass && allowed.count(c);
    std::cout << "  " << c << ' ' << (entry.second.pass ? "PASS" : "FAIL") << (tolerated ? " (known)" : "") << '\n';
    if (!entry.second.pass && !tolerated) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
