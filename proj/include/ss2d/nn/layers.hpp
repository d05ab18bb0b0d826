#pragma once

#include <random>
#include <string>
#include <vector>

#include "ss2d/nn/tensor.hpp"

namespace ss2d::nn {

struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter() = default;
  Parameter(std::string n, std::vector<std::size_t> shape)
      : name(std::move(n)), value(shape), grad(std::move(shape)) {}
};

enum class Activation { Linear, Relu };

/// y = act(x W + b) over a batch of rows.
class DenseLayer {
 public:
  DenseLayer(std::string name, std::size_t in, std::size_t out, Activation act);

  std::size_t in_dim() const { return weights_.value.dim(0); }
  std::size_t out_dim() const { return weights_.value.dim(1); }
  Activation activation() const { return act_; }

  /// x: [batch, in] -> [batch, out]. Keeps what backward needs.
  Tensor forward(const Tensor& x, kernel::GemmMode mode = kernel::GemmMode::Blas);
  /// Accumulates parameter gradients and returns d loss / d x.
  Tensor backward(const Tensor& dy);

  /// Uniform +-sqrt(6 / (fan_in + fan_out)); zero bias.
  void initialize(std::mt19937_64& rng);
  std::vector<Parameter*> parameters() { return {&weights_, &bias_}; }

 private:
  std::string name_;
  Parameter weights_;
  Parameter bias_;
  Activation act_;
  Tensor input_;
  Tensor output_;
};

/// Standard LSTM: sigmoid input/forget/output gates, tanh candidate and cell output.
/// Gate blocks are laid out [input | forget | candidate | output] along the 4H axis.
class LstmLayer {
 public:
  LstmLayer(std::string name, std::size_t in, std::size_t hidden);

  std::size_t in_dim() const { return w_input_.value.dim(0); }
  std::size_t hidden() const { return w_hidden_.value.dim(0); }

  /// x: [batch, steps, in] -> hidden states [batch, steps, hidden]; zero initial state.
  Tensor forward(const Tensor& x, kernel::GemmMode mode = kernel::GemmMode::Blas);
  /// dh: gradient w.r.t. every emitted hidden state. Returns d loss / d x.
  Tensor backward(const Tensor& dh);

  /// Uniform +-1/sqrt(H) weights, zero bias except forget gate +1.
  void initialize(std::mt19937_64& rng);
  std::vector<Parameter*> parameters() { return {&w_input_, &w_hidden_, &bias_}; }

 private:
  std::string name_;
  Parameter w_input_;
  Parameter w_hidden_;
  Parameter bias_;

  std::size_t batch_ = 0;
  std::size_t steps_ = 0;
  Tensor input_;
  std::vector<std::vector<Real>> gates_;  // per step, activated [B x 4H]
  std::vector<std::vector<Real>> cell_;   // per step + 1, [B x H]; index 0 is the zero state
  std::vector<std::vector<Real>> hid_;    // per step + 1
  std::vector<std::vector<Real>> tanh_cell_;
};

}  // namespace ss2d::nn
