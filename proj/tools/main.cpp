#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ss2d/config.hpp"
#include "ss2d/csv.hpp"
#include "ss2d/dataset.hpp"
#include "ss2d/error.hpp"
#include "ss2d/eval.hpp"
#include "ss2d/hash.hpp"
#include "ss2d/models.hpp"
#include "ss2d/nn/checkpoint.hpp"
#include "ss2d/nn/grad_check.hpp"
#include "ss2d/pipeline.hpp"
#include "ss2d/world_sim.hpp"

extern char** environ;

namespace {

using namespace ss2d;

struct ConfigOptions {
  std::string file;
  std::vector<std::string> sets;
};

void add_config_options(CLI::App* cmd, ConfigOptions& opts) {
  cmd->add_option("--config", opts.file, "TOML-style config file");
  cmd->add_option("--set", opts.sets, "Override a config key, e.g. --set train.epochs=5")->take_all();
}

config::RunConfig resolve(const ConfigOptions& opts) {
  config::RunConfig cfg;
  if (!opts.file.empty()) config::apply_file(cfg, opts.file);
  config::apply_env(cfg, environ);
  for (const auto& s : opts.sets) config::apply_assignment(cfg, s);
  return cfg;
}

std::vector<std::size_t> parse_widths(const std::string& text) {
  std::vector<std::size_t> out;
  for (auto part : csv::split(text)) {
    const long long n = csv::to_int(part);
    if (n <= 0) fail(ErrorCategory::Usage, "layer widths must be positive");
    out.push_back(static_cast<std::size_t>(n));
  }
  return out;
}

/// data_seed recorded in a dataset header, so the train/validation split matches gen-data.
std::optional<std::uint64_t> header_data_seed(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCategory::Io, "cannot open dataset " + path);
  for (const auto& [k, v] : csv::read_comment_header(is)) {
    if (k == "data_seed") return static_cast<std::uint64_t>(csv::to_int(v));
  }
  return std::nullopt;
}

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> out;
  for (auto part : csv::split(text)) {
    if (!part.empty()) out.emplace_back(part);
  }
  return out;
}

template <typename Fn>
void write_file(const std::string& path, Fn&& fn) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorCategory::Io, "cannot write " + path);
  fn(os);
  os.close();
  if (!os) fail(ErrorCategory::Io, "failed writing " + path);
}

int run(int argc, char** argv) {
  CLI::App app{"Soccer Simulation 2D observation denoising workbench"};
  app.require_subcommand(1);

  ConfigOptions co;
  int jobs = 1;

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run scripted episodes and write one trajectory CSV each");
  std::optional<int> sim_episodes;
  std::optional<std::uint64_t> sim_seed;
  std::optional<int> sim_len;
  std::string sim_out;
  add_config_options(simulate, co);
  simulate->add_option("--episodes", sim_episodes, "Number of episodes");
  simulate->add_option("--seed", sim_seed, "Base seed; episode i uses seed + i");
  simulate->add_option("--episode-len", sim_len, "Cycles per episode");
  simulate->add_option("--out", sim_out, "Output directory")->required();

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "Generate the (noisy, true) dataset");
  std::optional<int> gen_episodes;
  std::optional<std::uint64_t> gen_seed;
  std::optional<std::string> gen_observer;
  std::optional<std::string> gen_object;
  std::string gen_out;
  add_config_options(gen, co);
  gen->add_option("--episodes", gen_episodes, "Number of episodes");
  gen->add_option("--seed", gen_seed, "Base seed; episode i uses seed + i");
  gen->add_option("--observer", gen_observer, "Observing player, e.g. L9");
  gen->add_option("--object", gen_object, "Tracked object, e.g. L5");
  gen->add_option("--out", gen_out, "Output CSV")->required();
  gen->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  // train
  auto* train = app.add_subcommand("train", "Train a dnn or lstm model on a dataset");
  std::string train_model_name;
  std::optional<std::string> train_layers;
  std::optional<std::string> train_head;
  std::optional<int> train_epochs;
  std::optional<std::uint64_t> train_seed;
  std::optional<double> train_lr;
  std::string train_data;
  std::string train_out;
  std::string train_curve;
  add_config_options(train, co);
  train->add_option("--model", train_model_name, "dnn or lstm")->required()->check(CLI::IsMember({"dnn", "lstm"}));
  train->add_option("--layers", train_layers, "Comma-separated layer widths");
  train->add_option("--head", train_head, "Dense head widths after the lstm stack");
  train->add_option("--epochs", train_epochs, "Training epochs");
  train->add_option("--seed", train_seed, "Training seed");
  train->add_option("--lr", train_lr, "Learning rate");
  train->add_option("--data", train_data, "Dataset CSV")->required();
  train->add_option("--out", train_out, "Checkpoint path")->required();
  train->add_option("--curve", train_curve, "Loss curve CSV");

  // eval
  auto* evaluate = app.add_subcommand("eval", "Build error grids, comparisons and an RMSE summary");
  std::string eval_data;
  std::string eval_estimators = "last_seen,helios,extrapolate";
  std::string eval_out;
  std::string eval_split = "all";
  std::optional<long long> eval_min_samples;
  add_config_options(evaluate, co);
  evaluate->add_option("--data", eval_data, "Dataset CSV")->required();
  evaluate->add_option("--estimators", eval_estimators,
                       "Comma-separated: last_seen, helios, extrapolate, dnn:PATH, lstm:PATH")
      ->capture_default_str();
  evaluate->add_option("--grid-out", eval_out, "Output directory")->required();
  evaluate->add_option("--split", eval_split, "Evaluate all episodes or only the validation split")
      ->check(CLI::IsMember({"all", "val"}))
      ->capture_default_str();
  evaluate->add_option("--min-samples", eval_min_samples, "Samples per cell needed to declare a winner");
  evaluate->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  // heatmap
  auto* heatmap = app.add_subcommand("heatmap", "Render a grid CSV, or a comparison of two, as SVG");
  std::string hm_grid;
  std::string hm_compare;
  std::string hm_out;
  std::optional<long long> hm_min_samples;
  add_config_options(heatmap, co);
  heatmap->add_option("--grid", hm_grid, "Grid CSV")->required();
  heatmap->add_option("--compare", hm_compare, "Second grid CSV; renders winner per cell");
  heatmap->add_option("--out", hm_out, "Output SVG")->required();
  heatmap->add_option("--min-samples", hm_min_samples, "Samples per cell needed to color it");

  // pipeline
  auto* pipe = app.add_subcommand("pipeline", "gen-data, train both models and eval in one run");
  std::optional<std::uint64_t> pipe_seed;
  std::optional<int> pipe_episodes;
  std::optional<int> pipe_epochs;
  std::string pipe_out = "run";
  add_config_options(pipe, co);
  pipe->add_option("--seed", pipe_seed, "Dataset and training seed");
  pipe->add_option("--episodes", pipe_episodes, "Number of episodes");
  pipe->add_option("--epochs", pipe_epochs, "Training epochs");
  pipe->add_option("--out", pipe_out, "Output directory")->capture_default_str();
  pipe->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  // grad-check
  auto* gc = app.add_subcommand("grad-check", "Finite-difference gradient check of small networks");
  std::uint64_t gc_seed = 1;
  double gc_eps = 1e-4;
  double gc_tol = 1e-4;
  gc->add_option("--seed", gc_seed, "Initialization seed")->capture_default_str();
  gc->add_option("--eps", gc_eps, "Central-difference step")->capture_default_str();
  gc->add_option("--tol", gc_tol, "Maximum relative error")->capture_default_str();

  // config
  auto* show = app.add_subcommand("config", "Print the resolved configuration and its hash");
  add_config_options(show, co);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::fprintf(stderr, "error: usage: %s\n", e.what());
    return 2;
  }

  if (*simulate) {
    auto cfg = resolve(co);
    if (sim_episodes) cfg.episodes = *sim_episodes;
    if (sim_seed) cfg.data_seed = *sim_seed;
    if (sim_len) cfg.data.sim.kinematics.episode_len = *sim_len;
    cfg.validate();
    std::error_code ec;
    std::filesystem::create_directories(sim_out, ec);
    if (ec) fail(ErrorCategory::Io, "cannot create directory " + sim_out + ": " + ec.message());
    for (int i = 0; i < cfg.episodes; ++i) {
      const std::uint64_t seed = cfg.data_seed + static_cast<std::uint64_t>(i);
      const auto traj = sim::run_episode(cfg.data.sim, seed);
      const auto path = (std::filesystem::path(sim_out) / ("episode_" + std::to_string(i) + ".csv")).string();
      write_file(path, [&](std::ostream& os) {
        sim::write_trajectory_csv(os, traj, config::provenance(cfg, "trajectory") + " episode_seed=" + std::to_string(seed));
      });
    }
    std::printf("wrote %d episodes to %s\n", cfg.episodes, sim_out.c_str());
    return 0;
  }

  if (*gen) {
    auto cfg = resolve(co);
    if (gen_episodes) cfg.episodes = *gen_episodes;
    if (gen_seed) cfg.data_seed = *gen_seed;
    if (gen_observer) cfg.data.observer = sim::ObjectId::parse(*gen_observer);
    if (gen_object) cfg.data.object = sim::ObjectId::parse(*gen_object);
    cfg.validate();
    const auto records = dataset::generate_dataset(cfg.episodes, cfg.data_seed, cfg.data, jobs);
    dataset::save_dataset(gen_out, records, config::provenance(cfg, "dataset"));
    std::printf("wrote %zu records to %s\n", records.size(), gen_out.c_str());
    return 0;
  }

  if (*train) {
    auto cfg = resolve(co);
    const auto kind = models::parse_model_kind(train_model_name);
    auto& spec = kind == models::ModelKind::Dnn ? cfg.dnn : cfg.lstm;
    if (train_layers) spec.layers = parse_widths(*train_layers);
    if (train_head) spec.head = parse_widths(*train_head);
    if (train_epochs) cfg.train.epochs = *train_epochs;
    if (train_seed) cfg.train.seed = *train_seed;
    if (train_lr) cfg.train.learning_rate = *train_lr;
    if (auto s = header_data_seed(train_data)) cfg.data_seed = *s;
    cfg.validate();
    const auto records = dataset::load_dataset(train_data);
    const auto data = pipeline::prepare(records, cfg);
    auto result = pipeline::train(cfg, kind, data);
    nn::save_checkpoint(train_out, result.model, config::provenance(cfg, train_model_name));
    if (!train_curve.empty())
      pipeline::write_curve_csv(train_curve, result.curve, config::provenance(cfg, train_model_name + "_curve"));
    const auto& best = result.curve[static_cast<std::size_t>(result.best_epoch)];
    std::printf("%s: %zu train / %zu val windows, best epoch %d, val loss %s\n", train_model_name.c_str(),
                data.train_samples.size(), data.val_samples.size(), result.best_epoch,
                csv::fmt(best.val_loss).c_str());
    return 0;
  }

  if (*evaluate) {
    auto cfg = resolve(co);
    if (eval_min_samples) cfg.min_samples = *eval_min_samples;
    if (auto s = header_data_seed(eval_data)) cfg.data_seed = *s;
    cfg.validate();
    const auto records = dataset::load_dataset(eval_data);
    auto registry = eval::classical_registry(cfg.data.sim.kinematics);
    std::vector<std::string> names;
    for (const auto& item : split_names(eval_estimators)) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) {
        if (!registry.contains(item)) registry.get(item);
        names.push_back(item);
        continue;
      }
      const std::string name = item.substr(0, colon);
      if (name != "dnn" && name != "lstm") fail(ErrorCategory::Usage, "only dnn and lstm take a checkpoint path");
      auto net = std::make_shared<const nn::Network>(nn::load_checkpoint(item.substr(colon + 1)));
      registry.add(name, pipeline::model_estimator(net));
      names.push_back(name);
    }
    std::vector<dataset::DatasetRecord> eval_records;
    std::vector<std::size_t> windows;
    if (eval_split == "val") {
      auto data = pipeline::prepare(records, cfg);
      eval_records = std::move(data.val_records);
      windows = std::move(data.val_windows);
    } else {
      eval_records = records;
      windows = dataset::extract_windows(eval_records, cfg.data.warmup);
    }
    const auto out = pipeline::evaluate(eval_records, windows, registry, names, cfg, jobs);
    pipeline::write_eval_outputs(eval_out, out, cfg);
    std::printf("estimator,samples,rmse_all,rmse_pos_count_ge_%d\n", cfg.summary_min_pos_count);
    for (const auto& r : out.summary)
      std::printf("%s,%lld,%.4f,%.4f\n", r.estimator.c_str(), r.samples, r.rmse_all, r.rmse_filtered);
    return 0;
  }

  if (*heatmap) {
    auto cfg = resolve(co);
    if (hm_min_samples) cfg.min_samples = *hm_min_samples;
    auto load = [](const std::string& path) {
      std::ifstream is(path, std::ios::binary);
      if (!is) fail(ErrorCategory::Io, "cannot open grid " + path);
      try {
        return eval::read_grid_csv(is);
      } catch (const Error& e) {
        fail(e.category(), path + ": " + e.what());
      }
    };
    const auto a = load(hm_grid);
    if (hm_compare.empty()) {
      write_file(hm_out, [&](std::ostream& os) {
        eval::render_grid_svg(os, a, cfg.min_samples, config::provenance(cfg, "heatmap"));
      });
    } else {
      const auto cmp = eval::compare_grids(a, load(hm_compare), cfg.min_samples);
      write_file(hm_out, [&](std::ostream& os) {
        eval::render_comparison_svg(os, cmp, config::provenance(cfg, "comparison"));
      });
    }
    std::printf("wrote %s\n", hm_out.c_str());
    return 0;
  }

  if (*pipe) {
    auto cfg = resolve(co);
    if (pipe_seed) {
      cfg.data_seed = *pipe_seed;
      cfg.train.seed = *pipe_seed;
    }
    if (pipe_episodes) cfg.episodes = *pipe_episodes;
    if (pipe_epochs) cfg.train.epochs = *pipe_epochs;
    const auto res = pipeline::run_pipeline(cfg, pipe_out, jobs);
    std::printf("config_hash %s\n", hex64(config::config_hash(cfg)).c_str());
    std::printf("estimator,samples,rmse_all,rmse_pos_count_ge_%d\n", cfg.summary_min_pos_count);
    for (const auto& r : res.eval.summary)
      std::printf("%s,%lld,%.4f,%.4f\n", r.estimator.c_str(), r.samples, r.rmse_all, r.rmse_filtered);
    for (const auto& cmp : res.eval.comparisons) {
      const auto share = eval::count_winners(cmp, cfg.summary_min_pos_count);
      std::printf("%s vs %s: %d/%d populated cells favor %s (pos_count >= %d), %d insufficient\n",
                  cmp.name_a.c_str(), cmp.name_b.c_str(), share.a, share.a + share.b, cmp.name_a.c_str(),
                  cfg.summary_min_pos_count, share.insufficient);
    }
    std::printf("artifacts in %s\n", pipe_out.c_str());
    return 0;
  }

  if (*gc) {
    bool ok = true;
    for (const auto& c : nn::standard_grad_checks(gc_seed, gc_eps, gc_tol)) {
      std::printf("%-8s %-34s params=%-4zu max_rel_error=%.3e worst=%s %s\n", c.name.c_str(), c.descriptor.c_str(),
                  c.parameters, c.report.max_rel_error, c.report.worst_parameter.c_str(),
                  c.report.passed ? "ok" : "FAIL");
      ok = ok && c.report.passed;
    }
    return ok ? 0 : 1;
  }

  if (*show) {
    auto cfg = resolve(co);
    cfg.validate();
    std::printf("# config_hash=%s\n%s", hex64(config::config_hash(cfg)).c_str(), config::to_toml(cfg).c_str());
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ss2d::Error& e) {
    std::fprintf(stderr, "error: %s: %s\n", ss2d::to_string(e.category()), e.what());
    return e.category() == ss2d::ErrorCategory::Usage ? 2 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: internal: %s\n", e.what());
    return 1;
  }
}
