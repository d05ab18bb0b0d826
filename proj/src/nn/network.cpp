#include "ss2d/nn/network.hpp"

#include <random>
#include <sstream>

#include "ss2d/error.hpp"

namespace ss2d::nn {

namespace {

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  if (text.empty()) return out;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v <= 0) throw std::invalid_argument(item);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      fail(ErrorCategory::Format, "bad layer size '" + item + "'");
    }
  }
  return out;
}

}  // namespace

void Architecture::validate() const {
  if (input_dim == 0 || output_dim == 0) fail(ErrorCategory::Validation, "architecture needs input and output sizes");
  for (auto s : recurrent)
    if (s == 0) fail(ErrorCategory::Validation, "zero-width recurrent layer");
  for (auto s : dense)
    if (s == 0) fail(ErrorCategory::Validation, "zero-width dense layer");
}

std::string Architecture::descriptor() const {
  return "in=" + std::to_string(input_dim) + ";lstm=" + join(recurrent) + ";dense=" + join(dense) +
         ";out=" + std::to_string(output_dim);
}

Architecture Architecture::parse(const std::string& descriptor) {
  Architecture a;
  std::istringstream is(descriptor);
  std::string part;
  while (std::getline(is, part, ';')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) fail(ErrorCategory::Format, "bad architecture field '" + part + "'");
    const std::string key = part.substr(0, eq);
    const std::string val = part.substr(eq + 1);
    if (key == "in") {
      a.input_dim = parse_sizes(val).at(0);
    } else if (key == "out") {
      a.output_dim = parse_sizes(val).at(0);
    } else if (key == "lstm") {
      a.recurrent = parse_sizes(val);
    } else if (key == "dense") {
      a.dense = parse_sizes(val);
    } else {
      fail(ErrorCategory::Format, "unknown architecture field '" + key + "'");
    }
  }
  a.validate();
  return a;
}

Network::Network(Architecture arch) : arch_(std::move(arch)) {
  arch_.validate();
  std::size_t width = arch_.input_dim;
  for (std::size_t i = 0; i < arch_.recurrent.size(); ++i) {
    lstm_.emplace_back("lstm[" + std::to_string(i) + "]", width, arch_.recurrent[i]);
    width = arch_.recurrent[i];
  }
  for (std::size_t i = 0; i < arch_.dense.size(); ++i) {
    dense_.emplace_back("dense[" + std::to_string(i) + "]", width, arch_.dense[i], Activation::Relu);
    width = arch_.dense[i];
  }
  dense_.emplace_back("output", width, arch_.output_dim, Activation::Linear);
}

void Network::initialize(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (auto& l : lstm_) l.initialize(rng);
  for (auto& l : dense_) l.initialize(rng);
  zero_grad();
}

Tensor Network::forward(const Tensor& x, kernel::GemmMode mode) {
  if (x.empty()) fail(ErrorCategory::Validation, "forward: empty input");
  Tensor h = x;
  batch_ = x.dim(0);
  if (!lstm_.empty()) {
    if (x.rank() != 3)
      fail(ErrorCategory::Validation, "lstm[0]: expected [batch, steps, features], got " + x.shape_string());
    steps_ = x.dim(1);
    for (auto& l : lstm_) h = l.forward(h, mode);
    const std::size_t width = lstm_.back().hidden();
    Tensor last({batch_, width});
    for (std::size_t b = 0; b < batch_; ++b)
      for (std::size_t j = 0; j < width; ++j) last.at(b, j) = h[(b * steps_ + steps_ - 1) * width + j];
    h = std::move(last);
  }
  for (auto& l : dense_) h = l.forward(h, mode);
  return h;
}

void Network::backward(const Tensor& dy) {
  Tensor g = dy;
  for (auto it = dense_.rbegin(); it != dense_.rend(); ++it) g = it->backward(g);
  if (lstm_.empty()) return;
  const std::size_t width = lstm_.back().hidden();
  Tensor seq({batch_, steps_, width});
  for (std::size_t b = 0; b < batch_; ++b)
    for (std::size_t j = 0; j < width; ++j) seq[(b * steps_ + steps_ - 1) * width + j] = g.at(b, j);
  for (auto it = lstm_.rbegin(); it != lstm_.rend(); ++it) seq = it->backward(seq);
}

void Network::zero_grad() {
  for (auto* p : parameters()) p->grad.fill(0);
}

std::vector<Parameter*> Network::parameters() {
  std::vector<Parameter*> out;
  for (auto& l : lstm_)
    for (auto* p : l.parameters()) out.push_back(p);
  for (auto& l : dense_)
    for (auto* p : l.parameters()) out.push_back(p);
  return out;
}

std::size_t Network::parameter_count() {
  std::size_t n = 0;
  for (auto* p : parameters()) n += p->value.size();
  return n;
}

std::vector<Real> Network::flat_values() {
  std::vector<Real> out;
  out.reserve(parameter_count());
  for (auto* p : parameters()) out.insert(out.end(), p->value.values().begin(), p->value.values().end());
  return out;
}

void Network::set_flat_values(const std::vector<Real>& values) {
  if (values.size() != parameter_count())
    fail(ErrorCategory::Validation, "parameter vector has " + std::to_string(values.size()) + " values, network needs " +
                                        std::to_string(parameter_count()));
  std::size_t off = 0;
  for (auto* p : parameters()) {
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(off), p->value.size(), p->value.data());
    off += p->value.size();
  }
}

std::vector<Real> Network::flat_grads() {
  std::vector<Real> out;
  for (auto* p : parameters()) out.insert(out.end(), p->grad.values().begin(), p->grad.values().end());
  return out;
}

Real mse_loss(const Tensor& pred, const Tensor& target, Tensor* grad) {
  if (pred.shape() != target.shape())
    fail(ErrorCategory::Validation, "mse: prediction " + pred.shape_string() + " vs target " + target.shape_string());
  if (pred.empty()) fail(ErrorCategory::Validation, "mse: empty batch");
  const Real n = static_cast<Real>(pred.size());
  Real sum = 0;
  if (grad) *grad = Tensor(pred.shape());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const Real d = pred[i] - target[i];
    sum += d * d;
    if (grad) (*grad)[i] = 2 * d / n;
  }
  return sum / n;
}

Real loss_and_grad(Network& net, const Tensor& x, const Tensor& y) {
  if (x.empty() || y.empty()) fail(ErrorCategory::Validation, "loss_and_grad: empty batch");
  net.zero_grad();
  const Tensor pred = net.forward(x);
  Tensor grad;
  const Real loss = mse_loss(pred, y, &grad);
  net.backward(grad);
  return loss;
}

}  // namespace ss2d::nn
