#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ss2d/config.hpp"
#include "ss2d/dataset.hpp"
#include "ss2d/eval.hpp"
#include "ss2d/models.hpp"

namespace ss2d::pipeline {

/// Episode-level split of a dataset plus the encoded windows of each side.
struct PreparedData {
  dataset::Split split;
  std::vector<dataset::DatasetRecord> train_records;
  std::vector<dataset::DatasetRecord> val_records;
  std::vector<std::size_t> train_windows;
  std::vector<std::size_t> val_windows;
  std::vector<models::WindowSample> train_samples;
  std::vector<models::WindowSample> val_samples;
};

/// The split is keyed on the dataset seed so every model trained from one dataset sees
/// the same validation episodes.
PreparedData prepare(const std::vector<dataset::DatasetRecord>& records, const config::RunConfig& cfg);

models::TrainResult train(const config::RunConfig& cfg, models::ModelKind kind, const PreparedData& data);

void write_curve_csv(const std::string& path, const std::vector<models::EpochStats>& curve,
                     const std::string& header_comment);

/// Registry entry that encodes windows and runs the network; each call works on its own copy.
eval::Estimator model_estimator(std::shared_ptr<const nn::Network> model);

struct SummaryRow {
  std::string estimator;
  long long samples = 0;
  double rmse_all = 0.0;
  double rmse_filtered = 0.0;
};

struct EvalOutputs {
  std::map<std::string, eval::ErrorGrid> grids;
  std::vector<eval::ComparisonGrid> comparisons;
  std::vector<SummaryRow> summary;
};

/// Grids for every requested estimator, the three model comparisons that the available
/// estimators allow (dnn vs last_seen, lstm vs last_seen, lstm vs dnn), and RMSE rows.
EvalOutputs evaluate(const std::vector<dataset::DatasetRecord>& records, const std::vector<std::size_t>& windows,
                     const eval::EstimatorRegistry& registry, const std::vector<std::string>& estimators,
                     const config::RunConfig& cfg, int jobs);

/// grid_<name>.csv/.svg, compare_<a>_vs_<b>.csv/.svg and summary.csv under `dir`.
void write_eval_outputs(const std::string& dir, const EvalOutputs& out, const config::RunConfig& cfg);

struct PipelineResult {
  std::string dataset_path;
  std::string dnn_path;
  std::string lstm_path;
  std::string grid_dir;
  EvalOutputs eval;
};

/// gen-data, train dnn and lstm, eval on the validation episodes; all artifacts under `out_dir`.
PipelineResult run_pipeline(const config::RunConfig& cfg, const std::string& out_dir, int jobs);

}  // namespace ss2d::pipeline
