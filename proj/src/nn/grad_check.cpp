#include "ss2d/nn/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ss2d/error.hpp"

namespace ss2d::nn {

double relative_error(double analytic, double numeric, double floor) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

std::vector<double> numerical_gradient(Network& net, const Tensor& x, const Tensor& y, double eps) {
  std::vector<double> out;
  for (auto* p : net.parameters()) {
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      const Real saved = p->value[i];
      p->value[i] = saved + static_cast<Real>(eps);
      const double up = mse_loss(net.forward(x), y, nullptr);
      p->value[i] = saved - static_cast<Real>(eps);
      const double down = mse_loss(net.forward(x), y, nullptr);
      p->value[i] = saved;
      out.push_back((up - down) / (2.0 * eps));
    }
  }
  return out;
}

GradCheckReport compare_gradients(Network& net, const std::vector<double>& analytic,
                                  const std::vector<double>& numeric, double tol) {
  if (analytic.size() != numeric.size() || analytic.size() != net.parameter_count())
    fail(ErrorCategory::Validation, "grad_check: gradient vectors do not match parameter count");
  GradCheckReport r;
  r.rel_errors.resize(analytic.size());
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    r.rel_errors[i] = relative_error(analytic[i], numeric[i]);
    if (r.rel_errors[i] > r.max_rel_error) {
      r.max_rel_error = r.rel_errors[i];
      r.worst_index = i;
    }
  }
  std::size_t off = 0;
  for (auto* p : net.parameters()) {
    if (r.worst_index < off + p->value.size()) {
      r.worst_parameter = p->name + "[" + std::to_string(r.worst_index - off) + "]";
      break;
    }
    off += p->value.size();
  }
  r.passed = r.max_rel_error < tol;
  return r;
}

GradCheckReport grad_check(Network& net, const Tensor& x, const Tensor& y, double eps, double tol) {
  loss_and_grad(net, x, y);
  const auto grads = net.flat_grads();
  const std::vector<double> analytic(grads.begin(), grads.end());
  const auto numeric = numerical_gradient(net, x, y, eps);
  return compare_gradients(net, analytic, numeric, tol);
}

namespace {

struct Case {
  std::string name;
  Architecture arch;
};

std::vector<Case> standard_cases() {
  return {{"dense", {6, {}, {8, 6}, 2}}, {"lstm", {3, {5}, {}, 2}}, {"stacked", {4, {6, 4}, {5}, 2}}};
}

std::pair<Tensor, Tensor> random_batch(const Architecture& arch, std::uint64_t seed) {
  constexpr std::size_t kBatch = 3;
  constexpr std::size_t kSteps = 4;
  std::mt19937_64 rng(seed);
  std::normal_distribution<Real> dist(0.0, 1.0);
  Tensor x = arch.is_recurrent() ? Tensor({kBatch, kSteps, arch.input_dim}) : Tensor({kBatch, arch.input_dim});
  Tensor y({kBatch, arch.output_dim});
  for (auto& v : x.values()) v = dist(rng);
  for (auto& v : y.values()) v = dist(rng);
  return {x, y};
}

NamedCheck run_case(const Case& c, std::uint64_t seed, double eps, double tol, bool corrupt) {
  Network net(c.arch);
  net.initialize(seed);
  const auto [x, y] = random_batch(c.arch, seed + 1);
  NamedCheck out{c.name, c.arch.descriptor(), net.parameter_count(), {}};
  if (!corrupt) {
    out.report = grad_check(net, x, y, eps, tol);
    return out;
  }
  loss_and_grad(net, x, y);
  const auto grads = net.flat_grads();
  std::vector<double> analytic(grads.begin(), grads.end());
  const auto numeric = numerical_gradient(net, x, y, eps);
  const std::size_t k = analytic.size() / 2;
  analytic[k] = analytic[k] * 1.01 + 1e-3;
  out.name += "_corrupted";
  out.report = compare_gradients(net, analytic, numeric, tol);
  return out;
}

}  // namespace

std::vector<NamedCheck> standard_grad_checks(std::uint64_t seed, double eps, double tol) {
  std::vector<NamedCheck> out;
  for (const auto& c : standard_cases()) out.push_back(run_case(c, seed, eps, tol, false));
  return out;
}

NamedCheck corrupted_grad_check(std::uint64_t seed, double eps, double tol) {
  return run_case(standard_cases().back(), seed, eps, tol, true);
}

}  // namespace ss2d::nn
