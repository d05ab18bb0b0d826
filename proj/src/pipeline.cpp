#include "ss2d/pipeline.hpp"

#include <filesystem>
#include <fstream>

#include "ss2d/csv.hpp"
#include "ss2d/error.hpp"
#include "ss2d/nn/checkpoint.hpp"

namespace ss2d::pipeline {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorCategory::Io, "cannot write " + path);
  return os;
}

void close_out(std::ofstream& os, const std::string& path) {
  os.close();
  if (!os) fail(ErrorCategory::Io, "failed writing " + path);
}

void make_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCategory::Io, "cannot create directory " + dir + ": " + ec.message());
}

}  // namespace

PreparedData prepare(const std::vector<dataset::DatasetRecord>& records, const config::RunConfig& cfg) {
  PreparedData d;
  d.split = dataset::split_episodes(records, cfg.train.val_fraction, cfg.data_seed);
  d.train_records = dataset::select_episodes(records, d.split.train_episodes);
  d.val_records = dataset::select_episodes(records, d.split.val_episodes);
  d.train_windows = dataset::extract_windows(d.train_records, cfg.data.warmup);
  d.val_windows = dataset::extract_windows(d.val_records, cfg.data.warmup);
  if (d.train_windows.empty() || d.val_windows.empty())
    fail(ErrorCategory::Validation, "episodes too short to hold a single window after warmup");
  d.train_samples = models::encode_windows(d.train_records, d.train_windows);
  d.val_samples = models::encode_windows(d.val_records, d.val_windows);
  return d;
}

models::TrainResult train(const config::RunConfig& cfg, models::ModelKind kind, const PreparedData& data) {
  const auto& spec = kind == models::ModelKind::Dnn ? cfg.dnn : cfg.lstm;
  return models::train_model(spec, data.train_samples, data.val_samples, cfg.train);
}

void write_curve_csv(const std::string& path, const std::vector<models::EpochStats>& curve,
                     const std::string& header_comment) {
  auto os = open_out(path);
  if (!header_comment.empty()) os << "# " << header_comment << '\n';
  os << "epoch,train_loss,val_loss,best_val_loss\n";
  for (const auto& e : curve)
    os << e.epoch << ',' << csv::fmt(e.train_loss) << ',' << csv::fmt(e.val_loss) << ',' << csv::fmt(e.best_val_loss)
       << '\n';
  close_out(os, path);
}

eval::Estimator model_estimator(std::shared_ptr<const nn::Network> model) {
  return [model](const std::vector<dataset::DatasetRecord>& records, std::span<const std::size_t> idx) {
    nn::Network net = *model;
    const auto samples = models::encode_windows(records, std::vector<std::size_t>(idx.begin(), idx.end()));
    return models::predict_batch(net, samples);
  };
}

EvalOutputs evaluate(const std::vector<dataset::DatasetRecord>& records, const std::vector<std::size_t>& windows,
                     const eval::EstimatorRegistry& registry, const std::vector<std::string>& estimators,
                     const config::RunConfig& cfg, int jobs) {
  if (estimators.empty()) fail(ErrorCategory::Validation, "no estimators requested");
  EvalOutputs out;
  for (const auto& name : estimators) {
    out.grids.emplace(name, eval::build_error_grid(name, registry, records, windows, cfg.grid, jobs));
    const auto preds = registry.get(name)(records, windows);
    SummaryRow row;
    row.estimator = name;
    row.samples = static_cast<long long>(windows.size());
    row.rmse_all = eval::rmse(preds, records, windows, 0);
    row.rmse_filtered = eval::rmse(preds, records, windows, cfg.summary_min_pos_count);
    out.summary.push_back(row);
  }
  const std::pair<const char*, const char*> pairs[] = {{"dnn", "last_seen"}, {"lstm", "last_seen"}, {"lstm", "dnn"}};
  for (const auto& [a, b] : pairs) {
    if (out.grids.count(a) && out.grids.count(b))
      out.comparisons.push_back(eval::compare_grids(out.grids.at(a), out.grids.at(b), cfg.min_samples));
  }
  return out;
}

void write_eval_outputs(const std::string& dir, const EvalOutputs& out, const config::RunConfig& cfg) {
  make_dir(dir);
  for (const auto& [name, grid] : out.grids) {
    const std::string base = (fs::path(dir) / ("grid_" + name)).string();
    auto csv_os = open_out(base + ".csv");
    eval::write_grid_csv(csv_os, grid, config::provenance(cfg, "grid"));
    close_out(csv_os, base + ".csv");
    auto svg_os = open_out(base + ".svg");
    eval::render_grid_svg(svg_os, grid, cfg.min_samples, config::provenance(cfg, "heatmap"));
    close_out(svg_os, base + ".svg");
  }
  for (const auto& cmp : out.comparisons) {
    const std::string base = (fs::path(dir) / ("compare_" + cmp.name_a + "_vs_" + cmp.name_b)).string();
    auto csv_os = open_out(base + ".csv");
    eval::write_comparison_csv(csv_os, cmp, config::provenance(cfg, "comparison"));
    close_out(csv_os, base + ".csv");
    auto svg_os = open_out(base + ".svg");
    eval::render_comparison_svg(svg_os, cmp, config::provenance(cfg, "comparison"));
    close_out(svg_os, base + ".svg");
  }
  const std::string path = (fs::path(dir) / "summary.csv").string();
  auto os = open_out(path);
  os << "# " << config::provenance(cfg, "summary") << '\n';
  os << "estimator,samples,rmse_all,rmse_pos_count_ge_" << cfg.summary_min_pos_count << '\n';
  for (const auto& r : out.summary)
    os << r.estimator << ',' << r.samples << ',' << csv::fmt(r.rmse_all) << ',' << csv::fmt(r.rmse_filtered) << '\n';
  close_out(os, path);
}

PipelineResult run_pipeline(const config::RunConfig& cfg, const std::string& out_dir, int jobs) {
  cfg.validate();
  make_dir(out_dir);
  PipelineResult res;
  const fs::path root(out_dir);
  res.dataset_path = (root / "dataset.csv").string();
  res.dnn_path = (root / "dnn.ckpt").string();
  res.lstm_path = (root / "lstm.ckpt").string();
  res.grid_dir = (root / "grids").string();

  const auto records = dataset::generate_dataset(cfg.episodes, cfg.data_seed, cfg.data, jobs);
  dataset::save_dataset(res.dataset_path, records, config::provenance(cfg, "dataset"));
  const PreparedData data = prepare(records, cfg);

  auto registry = eval::classical_registry(cfg.data.sim.kinematics);
  for (const auto kind : {models::ModelKind::Dnn, models::ModelKind::Lstm}) {
    auto result = train(cfg, kind, data);
    const std::string name = models::to_string(kind);
    const std::string& path = kind == models::ModelKind::Dnn ? res.dnn_path : res.lstm_path;
    nn::save_checkpoint(path, result.model, config::provenance(cfg, name));
    write_curve_csv((root / (name + "_curve.csv")).string(), result.curve, config::provenance(cfg, name + "_curve"));
    registry.add(name, model_estimator(std::make_shared<const nn::Network>(std::move(result.model))));
  }

  res.eval = evaluate(data.val_records, data.val_windows, registry, {"last_seen", "helios", "extrapolate", "dnn", "lstm"},
                      cfg, jobs);
  write_eval_outputs(res.grid_dir, res.eval, cfg);
  return res;
}

}  // namespace ss2d::pipeline
