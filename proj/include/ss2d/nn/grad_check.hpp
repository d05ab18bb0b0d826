#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ss2d/nn/network.hpp"

namespace ss2d::nn {

struct GradCheckReport {
  std::vector<double> rel_errors;
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  std::string worst_parameter;
  bool passed = true;
};

/// |a - n| / max(|a|, |n|, floor). The floor keeps exactly-zero gradients comparable.
double relative_error(double analytic, double numeric, double floor = 1e-8);

/// Central differences of the MSE loss w.r.t. every parameter, in declaration order.
std::vector<double> numerical_gradient(Network& net, const Tensor& x, const Tensor& y, double eps);

GradCheckReport compare_gradients(Network& net, const std::vector<double>& analytic,
                                  const std::vector<double>& numeric, double tol);

/// Analytic vs numerical gradient; passes iff the largest relative error is below `tol`.
GradCheckReport grad_check(Network& net, const Tensor& x, const Tensor& y, double eps, double tol);

struct NamedCheck {
  std::string name;
  std::string descriptor;
  std::size_t parameters = 0;
  GradCheckReport report;
};

/// Dense-only, LSTM-only and stacked LSTM+dense networks under 1000 parameters each.
std::vector<NamedCheck> standard_grad_checks(std::uint64_t seed, double eps = 1e-4, double tol = 1e-4);

/// The stacked network with one analytic gradient entry perturbed; must not pass.
NamedCheck corrupted_grad_check(std::uint64_t seed, double eps = 1e-4, double tol = 1e-4);

}  // namespace ss2d::nn
