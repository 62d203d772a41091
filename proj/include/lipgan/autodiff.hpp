#pragma once

// Minimal reverse-mode differentiation over dense row-major matrices.
//
// Every backward rule is written in terms of the same differentiable ops, so
// a gradient computed with `create_graph = true` is itself a graph that can be
// differentiated again. The gradient-penalty critic loss depends on this: the
// penalty is a function of d(score)/d(input), and training needs its gradient
// with respect to the critic parameters.

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace lipgan::ad {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);
  Matrix(std::size_t rows, std::size_t cols, std::initializer_list<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> span() { return data_; }
  std::span<const double> span() const { return data_; }
  const std::vector<double>& values() const { return data_; }

  std::string shape_string() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

class Var;

// Receives the node's own output and the incoming gradient; returns one
// gradient per parent (an undefined Var where `needs[i]` is false).
using BackwardFn =
    std::function<std::vector<Var>(const Var& self, const Var& grad, const std::vector<bool>& needs)>;

struct Node {
  Matrix value;
  bool requires_grad = false;
  std::vector<Var> parents;
  BackwardFn backward;
};

class Var {
 public:
  Var() = default;
  explicit Var(Matrix value, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Matrix& value() const { return node_->value; }
  // Only meaningful for leaves (parameters); graph nodes are snapshots.
  Matrix& mutable_value() { return node_->value; }
  bool requires_grad() const { return node_ && node_->requires_grad; }
  std::size_t rows() const { return node_->value.rows(); }
  std::size_t cols() const { return node_->value.cols(); }
  double item() const;

  const Node* node() const { return node_.get(); }

 private:
  friend Var make_node(Matrix value, std::vector<Var> parents, BackwardFn backward);
  std::shared_ptr<Node> node_;
};

/// Builds a graph node when grad mode is on and any parent requires a
/// gradient; otherwise returns a constant.
Var make_node(Matrix value, std::vector<Var> parents, BackwardFn backward);

bool grad_enabled();

/// RAII switch for recording; nests.
class GradMode {
 public:
  explicit GradMode(bool enabled);
  ~GradMode();
  GradMode(const GradMode&) = delete;
  GradMode& operator=(const GradMode&) = delete;

 private:
  bool previous_;
};

struct NoGrad : GradMode {
  NoGrad() : GradMode(false) {}
};

/// d(output)/d(wrt[i]) for a 1x1 output. Unreachable inputs get zeros.
/// With create_graph the returned gradients are differentiable.
std::vector<Var> grad(const Var& output, std::span<const Var> wrt, bool create_graph = false);

Var constant(Matrix value);
Var zeros_like(const Var& v);

// Linear algebra.
Var matmul(const Var& a, const Var& b, bool trans_a = false, bool trans_b = false);

// Elementwise, equal shapes.
Var operator+(const Var& a, const Var& b);
Var operator-(const Var& a, const Var& b);
Var operator*(const Var& a, const Var& b);
Var operator-(const Var& a);
Var scale(const Var& a, double s);
Var add_scalar(const Var& a, double s);
Var one_minus(const Var& a);

// Broadcasts and reductions.
Var add_row(const Var& a, const Var& row);       // (r x c) + (1 x c)
Var sum_rows(const Var& a);                      // (r x c) -> (1 x c)
Var broadcast_rows(const Var& row, std::size_t rows);
Var sum_cols(const Var& a);                      // (r x c) -> (r x 1)
Var broadcast_cols(const Var& col, std::size_t cols);
Var sum(const Var& a);                           // -> (1 x 1)
Var mean(const Var& a);
Var broadcast_scalar(const Var& s, std::size_t rows, std::size_t cols);

// Nonlinearities.
Var sigmoid(const Var& a);
Var tanh(const Var& a);
Var log(const Var& a);
Var reciprocal(const Var& a);
Var sqrt(const Var& a);                          // gradient 0 at 0
Var relu(const Var& a);
Var square(const Var& a);
Var clamp(const Var& a, double lo, double hi);
Var softmax_rows(const Var& a);

}  // namespace lipgan::ad
