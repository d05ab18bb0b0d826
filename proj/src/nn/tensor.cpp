#include "ss2d/nn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include <cblas.h>

#include "ss2d/error.hpp"

namespace ss2d::nn {

namespace {

std::size_t product(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, Real fill) : shape_(std::move(shape)) {
  for (auto d : shape_) {
    if (d == 0) fail(ErrorCategory::Validation, "tensor dimensions must be positive");
  }
  data_.assign(product(shape_), fill);
}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<Real> data) : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != product(shape_))
    fail(ErrorCategory::Validation, "tensor data length does not match shape " + shape_string());
}

void Tensor::fill(Real v) { std::fill(data_.begin(), data_.end(), v); }

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](Real v) { return std::isfinite(v); });
}

std::string Tensor::shape_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape_[i]);
  }
  return s + "]";
}

namespace kernel {

namespace {

blasint dim(std::size_t v) { return static_cast<blasint>(v); }

}  // namespace

void gemm(const Real* a, std::size_t lda, const Real* b, std::size_t ldb, Real* c, std::size_t ldc, std::size_t m,
          std::size_t k, std::size_t n, bool accumulate, GemmMode mode) {
  if (mode == GemmMode::RowStable) {
    for (std::size_t i = 0; i < m; ++i) {
      Real* ci = c + i * ldc;
      if (!accumulate) std::fill_n(ci, n, Real{0});
      for (std::size_t p = 0; p < k; ++p) {
        const Real aip = a[i * lda + p];
        const Real* bp = b + p * ldb;
        for (std::size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
      }
    }
    return;
  }
  cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, dim(m), dim(n), dim(k), 1.0, a, dim(lda), b, dim(ldb),
              accumulate ? 1.0 : 0.0, c, dim(ldc));
}

void gemm_tn_acc(const Real* a, std::size_t lda, const Real* b, std::size_t ldb, Real* c, std::size_t ldc,
                 std::size_t m, std::size_t k, std::size_t n) {
  cblas_dgemm(CblasRowMajor, CblasTrans, CblasNoTrans, dim(k), dim(n), dim(m), 1.0, a, dim(lda), b, dim(ldb), 1.0, c,
              dim(ldc));
}

void gemm_nt(const Real* a, std::size_t lda, const Real* b, std::size_t ldb, Real* c, std::size_t ldc, std::size_t m,
             std::size_t k, std::size_t n, bool accumulate) {
  cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasTrans, dim(m), dim(k), dim(n), 1.0, a, dim(lda), b, dim(ldb),
              accumulate ? 1.0 : 0.0, c, dim(ldc));
}

}  // namespace kernel

}  // namespace ss2d::nn
