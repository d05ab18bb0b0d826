#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ss2d/nn/layers.hpp"
#include "ss2d/nn/tensor.hpp"

namespace ss2d::nn {

/// Stacked LSTM layers (optional) feeding ReLU dense layers and a linear output layer.
/// Without recurrent layers the input is [batch, features]; with them it is
/// [batch, steps, features] and the dense stack sees the last step's hidden state.
struct Architecture {
  std::size_t input_dim = 0;
  std::vector<std::size_t> recurrent;
  std::vector<std::size_t> dense;
  std::size_t output_dim = 0;

  bool is_recurrent() const { return !recurrent.empty(); }
  void validate() const;

  /// e.g. "in=10;lstm=64,32;dense=32;out=2"
  std::string descriptor() const;
  static Architecture parse(const std::string& descriptor);

  bool operator==(const Architecture&) const = default;
};

class Network {
 public:
  explicit Network(Architecture arch);

  const Architecture& architecture() const { return arch_; }

  /// Reproducible from the seed alone.
  void initialize(std::uint64_t seed);

  Tensor forward(const Tensor& x, kernel::GemmMode mode = kernel::GemmMode::Blas);
  /// Backpropagates d loss / d output of the most recent forward call, accumulating into grads.
  void backward(const Tensor& dy);
  void zero_grad();

  /// All parameters in declaration order: LSTM layers (w_input, w_hidden, bias), then dense
  /// layers (weight, bias).
  std::vector<Parameter*> parameters();
  std::size_t parameter_count();

  std::vector<Real> flat_values();
  void set_flat_values(const std::vector<Real>& values);
  std::vector<Real> flat_grads();

 private:
  Architecture arch_;
  std::vector<LstmLayer> lstm_;
  std::vector<DenseLayer> dense_;
  std::size_t steps_ = 0;
  std::size_t batch_ = 0;
};

/// Mean squared error over batch and output dims. Writes d loss / d pred into `grad`.
Real mse_loss(const Tensor& pred, const Tensor& target, Tensor* grad);

/// Runs forward + backward on one batch from zeroed gradients; returns the loss.
Real loss_and_grad(Network& net, const Tensor& x, const Tensor& y);

}  // namespace ss2d::nn
