#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "ss2d/dataset.hpp"
#include "ss2d/nn/network.hpp"
#include "ss2d/nn/optimizer.hpp"

namespace ss2d::models {

inline constexpr int kWindow = 5;
inline constexpr int kFeatures = 10;
inline constexpr int kFlatFeatures = kWindow * kFeatures;
inline constexpr double kPosCountCap = 30.0;
inline constexpr double kFeatureBound = 1.2;

/// Per cycle t-4..t: seen, est x/52.5, est y/34, est vx/1.05, est vy/1.05,
/// min(pos_count, 30)/30, observer x/52.5, observer y/34, sin(body), cos(body).
/// Features are clipped to +-1.2. Target is the true position at t, normalized.
struct WindowSample {
  std::array<double, kFlatFeatures> features{};
  Vec2 target;
  std::size_t record = 0;
};

/// `history` holds the 5 consecutive records ending at the target cycle. Only
/// agent-side fields are read for features.
WindowSample encode_window(std::span<const dataset::DatasetRecord> history);

std::vector<WindowSample> encode_windows(const std::vector<dataset::DatasetRecord>& records,
                                         const std::vector<std::size_t>& window_ends);

inline Vec2 normalize_position(Vec2 p) { return {p.x / kPitchHalfLength, p.y / kPitchHalfWidth}; }
inline Vec2 denormalize_position(Vec2 p) { return {p.x * kPitchHalfLength, p.y * kPitchHalfWidth}; }

enum class ModelKind { Dnn, Lstm };

ModelKind parse_model_kind(const std::string& name);
const char* to_string(ModelKind k);

struct ModelSpec {
  ModelKind kind = ModelKind::Dnn;
  /// Dense widths for a DNN, recurrent widths for an LSTM.
  std::vector<std::size_t> layers;
  /// ReLU dense layers between the last LSTM step and the linear output (LSTM only).
  std::vector<std::size_t> head;

  static ModelSpec defaults(ModelKind kind);
  nn::Architecture architecture() const;
  void validate() const;
};

/// [batch, 50] for a feed-forward network, [batch, 5, 10] for a recurrent one.
nn::Tensor make_input(const nn::Architecture& arch, std::span<const WindowSample> samples);

/// Positions in meters. A sample's prediction does not depend on the rest of the batch.
std::vector<Vec2> predict_batch(nn::Network& model, std::span<const WindowSample> samples);
Vec2 predict(nn::Network& model, const WindowSample& sample);

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double best_val_loss = 0.0;
};

struct TrainResult {
  nn::Network model;
  std::vector<EpochStats> curve;
  int best_epoch = 0;
};

/// Minibatch training with per-epoch shuffling; returns the parameters with the lowest
/// validation loss seen (epoch 0 = initialization).
TrainResult train_model(const ModelSpec& spec, const std::vector<WindowSample>& train,
                        const std::vector<WindowSample>& val, const nn::TrainConfig& cfg);

/// Normalized-target MSE of a network over samples.
double evaluate_loss(nn::Network& model, std::span<const WindowSample> samples);

}  // namespace ss2d::models
