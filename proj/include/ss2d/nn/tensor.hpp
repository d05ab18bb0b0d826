#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ss2d::nn {

using Real = double;

/// Dense row-major array of reals.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape, Real fill = 0);
  Tensor(std::vector<std::size_t> shape, std::vector<Real> data);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t i) const { return shape_.at(i); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  Real* data() { return data_.data(); }
  const Real* data() const { return data_.data(); }
  std::span<Real> values() { return data_; }
  std::span<const Real> values() const { return data_; }
  std::vector<Real>& storage() { return data_; }

  Real& operator[](std::size_t i) { return data_[i]; }
  Real operator[](std::size_t i) const { return data_[i]; }

  /// Element (r, c) of a rank-2 tensor.
  Real& at(std::size_t r, std::size_t c) { return data_[r * shape_[1] + c]; }
  Real at(std::size_t r, std::size_t c) const { return data_[r * shape_[1] + c]; }

  void fill(Real v);
  bool all_finite() const;
  std::string shape_string() const;

 private:
  std::vector<std::size_t> shape_;
  std::vector<Real> data_;
};

namespace kernel {

// Row-major matrices with explicit leading dimensions.

/// RowStable evaluates every output row with the same operation sequence, so a row's
/// result does not depend on its position in the batch. Blas is faster but its edge
/// kernels round differently.
enum class GemmMode { Blas, RowStable };

/// C[m x n] (+)= A[m x k] * B[k x n]
void gemm(const Real* a, std::size_t lda, const Real* b, std::size_t ldb, Real* c, std::size_t ldc, std::size_t m,
          std::size_t k, std::size_t n, bool accumulate, GemmMode mode = GemmMode::Blas);

/// C[k x n] += A[m x k]^T * B[m x n]
void gemm_tn_acc(const Real* a, std::size_t lda, const Real* b, std::size_t ldb, Real* c, std::size_t ldc,
                 std::size_t m, std::size_t k, std::size_t n);

/// C[m x k] (+)= A[m x n] * B[k x n]^T
void gemm_nt(const Real* a, std::size_t lda, const Real* b, std::size_t ldb, Real* c, std::size_t ldc, std::size_t m,
             std::size_t k, std::size_t n, bool accumulate);

void sigmoid_inplace(Real* v, std::size_t n);
void tanh_inplace(Real* v, std::size_t n);
/// out[i] = tanh(in[i])
void tanh_copy(const Real* in, Real* out, std::size_t n);

}  // namespace kernel

}  // namespace ss2d::nn
