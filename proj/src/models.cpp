#include "ss2d/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ss2d/error.hpp"

namespace ss2d::models {

namespace {

constexpr double kSpeedScale = 1.05;
constexpr std::size_t kEvalBatch = 1024;

double clip(double v) { return std::clamp(v, -kFeatureBound, kFeatureBound); }

}  // namespace

WindowSample encode_window(std::span<const dataset::DatasetRecord> history) {
  if (history.size() != static_cast<std::size_t>(kWindow))
    fail(ErrorCategory::Validation, "encode_window: need exactly " + std::to_string(kWindow) + " records");
  for (std::size_t k = 1; k < history.size(); ++k) {
    if (history[k].episode != history[0].episode || history[k].cycle != history[k - 1].cycle + 1)
      fail(ErrorCategory::Validation, "encode_window: gap in cycles at cycle " + std::to_string(history[k].cycle));
  }
  WindowSample s;
  for (std::size_t k = 0; k < history.size(); ++k) {
    const auto& r = history[k];
    double* f = s.features.data() + k * kFeatures;
    const double rad = r.observer_body * std::numbers::pi / 180.0;
    f[0] = r.seen ? 1.0 : 0.0;
    f[1] = clip(r.est_pos.x / kPitchHalfLength);
    f[2] = clip(r.est_pos.y / kPitchHalfWidth);
    f[3] = clip(r.est_vel.x / kSpeedScale);
    f[4] = clip(r.est_vel.y / kSpeedScale);
    f[5] = std::min(static_cast<double>(r.pos_count), kPosCountCap) / kPosCountCap;
    f[6] = clip(r.observer_pos.x / kPitchHalfLength);
    f[7] = clip(r.observer_pos.y / kPitchHalfWidth);
    f[8] = std::sin(rad);
    f[9] = std::cos(rad);
  }
  s.target = normalize_position(history.back().true_pos);
  return s;
}

std::vector<WindowSample> encode_windows(const std::vector<dataset::DatasetRecord>& records,
                                         const std::vector<std::size_t>& window_ends) {
  std::vector<WindowSample> out;
  out.reserve(window_ends.size());
  for (const std::size_t end : window_ends) {
    if (end + 1 < static_cast<std::size_t>(kWindow) || end >= records.size())
      fail(ErrorCategory::Validation, "encode_windows: window end out of range");
    WindowSample s = encode_window(std::span(records).subspan(end + 1 - kWindow, kWindow));
    s.record = end;
    out.push_back(s);
  }
  return out;
}

ModelKind parse_model_kind(const std::string& name) {
  if (name == "dnn") return ModelKind::Dnn;
  if (name == "lstm") return ModelKind::Lstm;
  fail(ErrorCategory::Validation, "unknown model '" + name + "' (expected dnn or lstm)");
}

const char* to_string(ModelKind k) { return k == ModelKind::Dnn ? "dnn" : "lstm"; }

ModelSpec ModelSpec::defaults(ModelKind kind) {
  if (kind == ModelKind::Dnn) return {kind, {512, 256, 128, 64, 32}, {}};
  return {kind, {512, 256}, {32}};
}

void ModelSpec::validate() const {
  if (layers.empty()) fail(ErrorCategory::Validation, "model spec needs at least one layer");
  if (kind == ModelKind::Dnn && !head.empty()) fail(ErrorCategory::Validation, "a dnn has no recurrent head");
}

nn::Architecture ModelSpec::architecture() const {
  validate();
  nn::Architecture a;
  a.output_dim = 2;
  if (kind == ModelKind::Dnn) {
    a.input_dim = kFlatFeatures;
    a.dense = layers;
  } else {
    a.input_dim = kFeatures;
    a.recurrent = layers;
    a.dense = head;
  }
  return a;
}

nn::Tensor make_input(const nn::Architecture& arch, std::span<const WindowSample> samples) {
  if (samples.empty()) fail(ErrorCategory::Validation, "make_input: no samples");
  const std::size_t n = samples.size();
  nn::Tensor x = arch.is_recurrent() ? nn::Tensor({n, static_cast<std::size_t>(kWindow), static_cast<std::size_t>(kFeatures)})
                                     : nn::Tensor({n, static_cast<std::size_t>(kFlatFeatures)});
  if (arch.input_dim != (arch.is_recurrent() ? std::size_t{kFeatures} : std::size_t{kFlatFeatures}))
    fail(ErrorCategory::Validation, "model input width " + std::to_string(arch.input_dim) +
                                        " does not match window features");
  for (std::size_t i = 0; i < n; ++i)
    std::copy(samples[i].features.begin(), samples[i].features.end(), x.data() + i * kFlatFeatures);
  return x;
}

std::vector<Vec2> predict_batch(nn::Network& model, std::span<const WindowSample> samples) {
  std::vector<Vec2> out;
  out.reserve(samples.size());
  for (std::size_t start = 0; start < samples.size(); start += kEvalBatch) {
    const auto chunk = samples.subspan(start, std::min(kEvalBatch, samples.size() - start));
    const nn::Tensor y = model.forward(make_input(model.architecture(), chunk), nn::kernel::GemmMode::RowStable);
    if (y.dim(1) != 2) fail(ErrorCategory::Validation, "model output width must be 2");
    for (std::size_t i = 0; i < chunk.size(); ++i) out.push_back(denormalize_position({y.at(i, 0), y.at(i, 1)}));
  }
  return out;
}

Vec2 predict(nn::Network& model, const WindowSample& sample) {
  return predict_batch(model, std::span<const WindowSample>(&sample, 1)).front();
}

double evaluate_loss(nn::Network& model, std::span<const WindowSample> samples) {
  if (samples.empty()) fail(ErrorCategory::Validation, "evaluate_loss: no samples");
  double sum = 0.0;
  for (std::size_t start = 0; start < samples.size(); start += kEvalBatch) {
    const auto chunk = samples.subspan(start, std::min(kEvalBatch, samples.size() - start));
    const nn::Tensor y = model.forward(make_input(model.architecture(), chunk));
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      const double dx = y.at(i, 0) - chunk[i].target.x;
      const double dy = y.at(i, 1) - chunk[i].target.y;
      sum += dx * dx + dy * dy;
    }
  }
  return sum / (2.0 * static_cast<double>(samples.size()));
}

TrainResult train_model(const ModelSpec& spec, const std::vector<WindowSample>& train,
                        const std::vector<WindowSample>& val, const nn::TrainConfig& cfg) {
  cfg.validate();
  if (train.empty() || val.empty()) fail(ErrorCategory::Validation, "train_model: empty training or validation set");

  TrainResult result{nn::Network(spec.architecture()), {}, 0};
  nn::Network& net = result.model;
  net.initialize(cfg.seed);
  nn::Optimizer opt(cfg.optimizer, cfg.learning_rate);
  const auto params = net.parameters();

  std::vector<nn::Real> best = net.flat_values();
  double best_loss = evaluate_loss(net, val);
  result.curve.push_back({0, evaluate_loss(net, train), best_loss, best_loss});

  std::mt19937_64 rng(cfg.seed ^ 0x5eedf00dULL);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<WindowSample> batch;
  batch.reserve(cfg.batch_size);
  nn::Tensor target;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t n = std::min(cfg.batch_size, order.size() - start);
      batch.clear();
      for (std::size_t i = 0; i < n; ++i) batch.push_back(train[order[start + i]]);
      target = nn::Tensor({n, 2});
      for (std::size_t i = 0; i < n; ++i) {
        target.at(i, 0) = batch[i].target.x;
        target.at(i, 1) = batch[i].target.y;
      }
      loss_sum += nn::loss_and_grad(net, make_input(net.architecture(), batch), target);
      opt.step(params);
      ++batches;
    }
    const double val_loss = evaluate_loss(net, val);
    if (val_loss < best_loss) {
      best_loss = val_loss;
      best = net.flat_values();
      result.best_epoch = epoch;
    }
    result.curve.push_back({epoch, loss_sum / static_cast<double>(batches), val_loss, best_loss});
  }
  net.set_flat_values(best);
  return result;
}

}  // namespace ss2d::models
