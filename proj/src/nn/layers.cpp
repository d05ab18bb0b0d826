#include "ss2d/nn/layers.hpp"

#include <algorithm>
#include <cmath>

#include "ss2d/error.hpp"

namespace ss2d::nn {

namespace {

void check_width(const std::string& layer, const Tensor& x, std::size_t axis, std::size_t expected) {
  if (x.rank() <= axis || x.dim(axis) != expected)
    fail(ErrorCategory::Validation, layer + ": expected input width " + std::to_string(expected) + ", got shape " +
                                        x.shape_string());
}

}  // namespace

DenseLayer::DenseLayer(std::string name, std::size_t in, std::size_t out, Activation act)
    : name_(std::move(name)),
      weights_(name_ + ".weight", {in, out}),
      bias_(name_ + ".bias", {out}),
      act_(act) {}

void DenseLayer::initialize(std::mt19937_64& rng) {
  const Real limit = std::sqrt(Real{6} / static_cast<Real>(in_dim() + out_dim()));
  std::uniform_real_distribution<Real> dist(-limit, limit);
  for (auto& w : weights_.value.values()) w = dist(rng);
  bias_.value.fill(0);
}

Tensor DenseLayer::forward(const Tensor& x, kernel::GemmMode mode) {
  if (x.rank() != 2) fail(ErrorCategory::Validation, name_ + ": expected rank-2 input, got " + x.shape_string());
  check_width(name_, x, 1, in_dim());
  const std::size_t batch = x.dim(0);
  const std::size_t out = out_dim();
  Tensor y({batch, out});
  for (std::size_t b = 0; b < batch; ++b) std::copy_n(bias_.value.data(), out, y.data() + b * out);
  kernel::gemm(x.data(), in_dim(), weights_.value.data(), out, y.data(), out, batch, in_dim(), out, true, mode);
  if (act_ == Activation::Relu) {
    for (auto& v : y.values()) v = std::max(v, Real{0});
  }
  input_ = x;
  output_ = y;
  return y;
}

Tensor DenseLayer::backward(const Tensor& dy) {
  const std::size_t batch = input_.dim(0);
  const std::size_t out = out_dim();
  if (dy.rank() != 2 || dy.dim(0) != batch || dy.dim(1) != out)
    fail(ErrorCategory::Validation, name_ + ": gradient shape " + dy.shape_string() + " does not match output");
  Tensor dz = dy;
  if (act_ == Activation::Relu) {
    for (std::size_t i = 0; i < dz.size(); ++i) {
      if (output_[i] <= 0) dz[i] = 0;
    }
  }
  kernel::gemm_tn_acc(input_.data(), in_dim(), dz.data(), out, weights_.grad.data(), out, batch, in_dim(), out);
  for (std::size_t b = 0; b < batch; ++b) {
    const Real* row = dz.data() + b * out;
    for (std::size_t j = 0; j < out; ++j) bias_.grad[j] += row[j];
  }
  Tensor dx({batch, in_dim()});
  kernel::gemm_nt(dz.data(), out, weights_.value.data(), out, dx.data(), in_dim(), batch, in_dim(), out, false);
  return dx;
}

LstmLayer::LstmLayer(std::string name, std::size_t in, std::size_t hidden)
    : name_(std::move(name)),
      w_input_(name_ + ".w_input", {in, 4 * hidden}),
      w_hidden_(name_ + ".w_hidden", {hidden, 4 * hidden}),
      bias_(name_ + ".bias", {4 * hidden}) {}

void LstmLayer::initialize(std::mt19937_64& rng) {
  const std::size_t h = hidden();
  const Real limit = Real{1} / std::sqrt(static_cast<Real>(h));
  std::uniform_real_distribution<Real> dist(-limit, limit);
  for (auto& w : w_input_.value.values()) w = dist(rng);
  for (auto& w : w_hidden_.value.values()) w = dist(rng);
  bias_.value.fill(0);
  for (std::size_t j = h; j < 2 * h; ++j) bias_.value[j] = 1;
}

Tensor LstmLayer::forward(const Tensor& x, kernel::GemmMode mode) {
  if (x.rank() != 3) fail(ErrorCategory::Validation, name_ + ": expected [batch, steps, features], got " + x.shape_string());
  check_width(name_, x, 2, in_dim());
  batch_ = x.dim(0);
  steps_ = x.dim(1);
  const std::size_t in = in_dim();
  const std::size_t h = hidden();
  const std::size_t g4 = 4 * h;
  input_ = x;

  gates_.assign(steps_, std::vector<Real>(batch_ * g4));
  cell_.assign(steps_ + 1, std::vector<Real>(batch_ * h, 0));
  hid_.assign(steps_ + 1, std::vector<Real>(batch_ * h, 0));
  tanh_cell_.assign(steps_, std::vector<Real>(batch_ * h));

  Tensor out({batch_, steps_, h});
  for (std::size_t t = 0; t < steps_; ++t) {
    auto& z = gates_[t];
    for (std::size_t b = 0; b < batch_; ++b) std::copy_n(bias_.value.data(), g4, z.data() + b * g4);
    kernel::gemm(x.data() + t * in, steps_ * in, w_input_.value.data(), g4, z.data(), g4, batch_, in, g4, true, mode);
    if (t > 0) kernel::gemm(hid_[t].data(), h, w_hidden_.value.data(), g4, z.data(), g4, batch_, h, g4, true, mode);

    const auto& c_prev = cell_[t];
    auto& c = cell_[t + 1];
    auto& hs = hid_[t + 1];
    auto& tc = tanh_cell_[t];
    for (std::size_t b = 0; b < batch_; ++b) {
      Real* zr = z.data() + b * g4;
      kernel::sigmoid_inplace(zr, 2 * h);
      kernel::tanh_inplace(zr + 2 * h, h);
      kernel::sigmoid_inplace(zr + 3 * h, h);
      for (std::size_t j = 0; j < h; ++j) {
        const std::size_t k = b * h + j;
        c[k] = zr[h + j] * c_prev[k] + zr[j] * zr[2 * h + j];
      }
    }
    for (std::size_t b = 0; b < batch_; ++b) kernel::tanh_copy(c.data() + b * h, tc.data() + b * h, h);
    for (std::size_t b = 0; b < batch_; ++b) {
      const Real* og = z.data() + b * g4 + 3 * h;
      for (std::size_t j = 0; j < h; ++j) {
        const std::size_t k = b * h + j;
        hs[k] = og[j] * tc[k];
        out[(b * steps_ + t) * h + j] = hs[k];
      }
    }
  }
  return out;
}

Tensor LstmLayer::backward(const Tensor& dh) {
  const std::size_t in = in_dim();
  const std::size_t h = hidden();
  const std::size_t g4 = 4 * h;
  if (dh.rank() != 3 || dh.dim(0) != batch_ || dh.dim(1) != steps_ || dh.dim(2) != h)
    fail(ErrorCategory::Validation, name_ + ": gradient shape " + dh.shape_string() + " does not match output");

  Tensor dx({batch_, steps_, in});
  std::vector<Real> dh_next(batch_ * h, 0);
  std::vector<Real> dc_next(batch_ * h, 0);
  std::vector<Real> dz(batch_ * g4);

  for (std::size_t t = steps_; t-- > 0;) {
    const auto& gate = gates_[t];
    const auto& c_prev = cell_[t];
    const auto& tc = tanh_cell_[t];
    for (std::size_t b = 0; b < batch_; ++b) {
      const Real* gr = gate.data() + b * g4;
      Real* dzr = dz.data() + b * g4;
      for (std::size_t j = 0; j < h; ++j) {
        const std::size_t k = b * h + j;
        const Real ig = gr[j];
        const Real fg = gr[h + j];
        const Real cand = gr[2 * h + j];
        const Real og = gr[3 * h + j];
        const Real dhk = dh[(b * steps_ + t) * h + j] + dh_next[k];
        const Real dc = dhk * og * (1 - tc[k] * tc[k]) + dc_next[k];
        dzr[j] = dc * cand * ig * (1 - ig);
        dzr[h + j] = dc * c_prev[k] * fg * (1 - fg);
        dzr[2 * h + j] = dc * ig * (1 - cand * cand);
        dzr[3 * h + j] = dhk * tc[k] * og * (1 - og);
        dc_next[k] = dc * fg;
      }
    }
    kernel::gemm_tn_acc(input_.data() + t * in, steps_ * in, dz.data(), g4, w_input_.grad.data(), g4, batch_, in, g4);
    if (t > 0) kernel::gemm_tn_acc(hid_[t].data(), h, dz.data(), g4, w_hidden_.grad.data(), g4, batch_, h, g4);
    for (std::size_t b = 0; b < batch_; ++b) {
      const Real* row = dz.data() + b * g4;
      for (std::size_t j = 0; j < g4; ++j) bias_.grad[j] += row[j];
    }
    kernel::gemm_nt(dz.data(), g4, w_input_.value.data(), g4, dx.data() + t * in, steps_ * in, batch_, in, g4, false);
    if (t > 0) {
      kernel::gemm_nt(dz.data(), g4, w_hidden_.value.data(), g4, dh_next.data(), h, batch_, h, g4, false);
    }
  }
  return dx;
}

}  // namespace ss2d::nn
