#include <cmath>

#include "ss2d/nn/tensor.hpp"

// Built with vector math enabled so these loops map onto libmvec.

namespace ss2d::nn::kernel {

void sigmoid_inplace(Real* __restrict v, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) v[i] = Real{1} / (Real{1} + std::exp(-v[i]));
}

void tanh_inplace(Real* __restrict v, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) v[i] = std::tanh(v[i]);
}

void tanh_copy(const Real* __restrict in, Real* __restrict out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::tanh(in[i]);
}

}  // namespace ss2d::nn::kernel
