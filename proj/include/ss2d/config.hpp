#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ss2d/dataset.hpp"
#include "ss2d/eval.hpp"
#include "ss2d/models.hpp"
#include "ss2d/nn/optimizer.hpp"

namespace ss2d::config {

/// Every tunable of a run. Layered as defaults < config file < SS2D_* environment < flags.
struct RunConfig {
  dataset::DatasetConfig data;
  int episodes = 40;
  std::uint64_t data_seed = 1;
  nn::TrainConfig train;
  models::ModelSpec dnn{models::ModelKind::Dnn, {64, 32, 16}, {}};
  models::ModelSpec lstm{models::ModelKind::Lstm, {64, 32}, {32}};
  eval::GridSpec grid;
  long long min_samples = 20;
  /// Lower pos_count bound for the RMSE summary.
  int summary_min_pos_count = 2;

  void validate() const;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Dotted keys ("train.epochs") in canonical order with canonical value text.
KeyValues to_key_values(const RunConfig& cfg);
/// Throws Validation on an unknown key or a malformed value.
void set_value(RunConfig& cfg, const std::string& key, const std::string& value);
std::vector<std::string> known_keys();

/// `[section]` headers, `key = value` lines, `#` comments; strings may be quoted,
/// arrays are `[a, b, ...]`. Values are returned unquoted.
KeyValues parse_toml(const std::string& text);
std::string to_toml(const RunConfig& cfg);

void apply_file(RunConfig& cfg, const std::string& path);
/// SS2D_TRAIN_EPOCHS=5 sets train.epochs. Variables matching no key are ignored.
void apply_env(RunConfig& cfg, char** envp);
/// "key=value"
void apply_assignment(RunConfig& cfg, const std::string& assignment);

std::uint64_t config_hash(const RunConfig& cfg);
/// Single-line provenance string written into every artifact header.
std::string provenance(const RunConfig& cfg, const std::string& artifact);

}  // namespace ss2d::config
