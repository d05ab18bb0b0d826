#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ss2d/nn/layers.hpp"

namespace ss2d::nn {

enum class OptimizerKind { Sgd, Adam };

OptimizerKind parse_optimizer(const std::string& name);
const char* to_string(OptimizerKind k);

struct TrainConfig {
  OptimizerKind optimizer = OptimizerKind::Adam;
  double learning_rate = 1e-3;
  std::size_t batch_size = 64;
  int epochs = 10;
  std::uint64_t seed = 1;
  double val_fraction = 0.2;

  void validate() const;
};

/// SGD: p -= lr * g. Adam: bias-corrected moments, beta1 0.9, beta2 0.999, eps 1e-8.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double learning_rate) : kind_(kind), lr_(learning_rate) {}

  void step(const std::vector<Parameter*>& params);
  long long steps_taken() const { return t_; }

  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

 private:
  OptimizerKind kind_;
  double lr_;
  long long t_ = 0;
  std::vector<std::vector<Real>> m_;
  std::vector<std::vector<Real>> v_;
};

}  // namespace ss2d::nn
