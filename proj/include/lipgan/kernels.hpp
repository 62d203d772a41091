#pragma once

// Dense numeric kernels behind the autodiff engine.
//
// Every kernel exists twice: a serial reference in `kernels::serial` and an
// OpenMP version in `kernels::parallel`. Both visit the reduction dimension in
// the same order for every output element, so their results are bit-identical
// regardless of thread count. The tests hold them to that.

#include <cstddef>
#include <span>

namespace lipgan::kernels {

/// Shape of C = op(A) * op(B), with op(X) = X or X^T.
/// A is stored row-major as (m x k) or, when trans_a, as (k x m); B likewise
/// as (k x n) or (n x k). C is (m x n) and is overwritten.
struct GemmShape {
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t k = 0;
  bool trans_a = false;
  bool trans_b = false;
};

enum class Unary { sigmoid, tanh };

namespace serial {

void gemm(const GemmShape& shape, std::span<const double> a, std::span<const double> b,
          std::span<double> c);

void unary(Unary fn, std::span<const double> in, std::span<double> out);

/// Row-wise softmax of a (rows x cols) matrix, max-shifted.
void softmax_rows(std::size_t rows, std::size_t cols, std::span<const double> in,
                  std::span<double> out);

}  // namespace serial

namespace parallel {

void gemm(const GemmShape& shape, std::span<const double> a, std::span<const double> b,
          std::span<double> c);

void unary(Unary fn, std::span<const double> in, std::span<double> out);

void softmax_rows(std::size_t rows, std::size_t cols, std::span<const double> in,
                  std::span<double> out);

}  // namespace parallel

/// Number of multiply-adds below which the parallel kernels stay on one thread.
inline constexpr std::size_t kParallelThreshold = 1u << 15;

}  // namespace lipgan::kernels
