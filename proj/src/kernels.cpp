#include "lipgan/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <omp.h>

namespace lipgan::kernels {
namespace {

void check_gemm(const GemmShape& s, std::span<const double> a, std::span<const double> b,
                std::span<double> c) {
  if (a.size() != s.m * s.k || b.size() != s.k * s.n || c.size() != s.m * s.n) {
    throw std::invalid_argument("gemm: buffer sizes do not match shape");
  }
}

// B in (k x n) layout; packs a transposed operand so the inner loop is unit-stride.
std::vector<double> pack_b(const GemmShape& s, std::span<const double> b) {
  std::vector<double> packed(s.k * s.n);
  for (std::size_t j = 0; j < s.n; ++j) {
    for (std::size_t p = 0; p < s.k; ++p) {
      packed[p * s.n + j] = b[j * s.k + p];
    }
  }
  return packed;
}

// One output row. Each C(i, j) accumulates over p in ascending order; both
// drivers call this, which is what makes them bit-identical.
inline void gemm_row(const GemmShape& s, std::size_t i, const double* a, const double* b,
                     double* c) {
  double* crow = c + i * s.n;
  std::fill(crow, crow + s.n, 0.0);
  for (std::size_t p = 0; p < s.k; ++p) {
    const double av = s.trans_a ? a[p * s.m + i] : a[i * s.k + p];
    if (av == 0.0) continue;
    const double* brow = b + p * s.n;
    for (std::size_t j = 0; j < s.n; ++j) {
      crow[j] += av * brow[j];
    }
  }
}

inline double apply(Unary fn, double x) {
  switch (fn) {
    case Unary::sigmoid:
      return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
    case Unary::tanh:
      return std::tanh(x);
  }
  return x;
}

inline void softmax_row(std::size_t cols, const double* in, double* out) {
  double mx = in[0];
  for (std::size_t j = 1; j < cols; ++j) mx = std::max(mx, in[j]);
  double total = 0.0;
  for (std::size_t j = 0; j < cols; ++j) {
    out[j] = std::exp(in[j] - mx);
    total += out[j];
  }
  const double inv = 1.0 / total;
  for (std::size_t j = 0; j < cols; ++j) out[j] *= inv;
}

}  // namespace

namespace serial {

void gemm(const GemmShape& shape, std::span<const double> a, std::span<const double> b,
          std::span<double> c) {
  check_gemm(shape, a, b, c);
  std::vector<double> packed;
  const double* bp = b.data();
  if (shape.trans_b) {
    packed = pack_b(shape, b);
    bp = packed.data();
  }
  for (std::size_t i = 0; i < shape.m; ++i) {
    gemm_row(shape, i, a.data(), bp, c.data());
  }
}

void unary(Unary fn, std::span<const double> in, std::span<double> out) {
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = apply(fn, in[i]);
}

void softmax_rows(std::size_t rows, std::size_t cols, std::span<const double> in,
                  std::span<double> out) {
  if (cols == 0) return;
  for (std::size_t r = 0; r < rows; ++r) softmax_row(cols, in.data() + r * cols, out.data() + r * cols);
}

}  // namespace serial

namespace parallel {

void gemm(const GemmShape& shape, std::span<const double> a, std::span<const double> b,
          std::span<double> c) {
  check_gemm(shape, a, b, c);
  std::vector<double> packed;
  const double* bp = b.data();
  if (shape.trans_b) {
    packed = pack_b(shape, b);
    bp = packed.data();
  }
  const auto rows = static_cast<std::ptrdiff_t>(shape.m);
  const bool big = shape.m * shape.n * shape.k >= kParallelThreshold;
#pragma omp parallel for schedule(static) if (big)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    gemm_row(shape, static_cast<std::size_t>(i), a.data(), bp, c.data());
  }
}

void unary(Unary fn, std::span<const double> in, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(in.size());
  const bool big = in.size() >= kParallelThreshold / 8;
#pragma omp parallel for schedule(static) if (big)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = apply(fn, in[i]);
}

void softmax_rows(std::size_t rows, std::size_t cols, std::span<const double> in,
                  std::span<double> out) {
  if (cols == 0) return;
  const auto n = static_cast<std::ptrdiff_t>(rows);
  const bool big = rows * cols >= kParallelThreshold / 8;
#pragma omp parallel for schedule(static) if (big)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    softmax_row(cols, in.data() + r * cols, out.data() + r * cols);
  }
}

}  // namespace parallel
}  // namespace lipgan::kernels
