#include "lipgan/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "lipgan/kernels.hpp"

namespace lipgan::ad {

// ---------------------------------------------------------------- Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (data_.size() != rows * cols) {
    throw std::invalid_argument("Matrix: value count does not match shape " +
                                std::to_string(rows) + "x" + std::to_string(cols));
  }
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::initializer_list<double> values)
    : Matrix(rows, cols, std::vector<double>(values)) {}

std::string Matrix::shape_string() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

// ---------------------------------------------------------------- grad mode

namespace {
thread_local bool g_grad_enabled = true;
}

bool grad_enabled() { return g_grad_enabled; }

GradMode::GradMode(bool enabled) : previous_(g_grad_enabled) { g_grad_enabled = enabled; }
GradMode::~GradMode() { g_grad_enabled = previous_; }

// ---------------------------------------------------------------- Var

Var::Var(Matrix value, bool requires_grad) : node_(std::make_shared<Node>()) {
  node_->value = std::move(value);
  node_->requires_grad = requires_grad;
}

double Var::item() const {
  if (value().size() != 1) {
    throw std::logic_error("item() on a " + value().shape_string() + " value");
  }
  return value()[0];
}

Var make_node(Matrix value, std::vector<Var> parents, BackwardFn backward) {
  const bool track = grad_enabled() && std::any_of(parents.begin(), parents.end(), [](const Var& p) {
                       return p.requires_grad();
                     });
  Var out;
  out.node_ = std::make_shared<Node>();
  out.node_->value = std::move(value);
  if (track) {
    out.node_->requires_grad = true;
    out.node_->parents = std::move(parents);
    out.node_->backward = std::move(backward);
  }
  return out;
}

Var constant(Matrix value) { return Var(std::move(value), false); }

Var zeros_like(const Var& v) { return constant(Matrix(v.rows(), v.cols())); }

// ---------------------------------------------------------------- grad

std::vector<Var> grad(const Var& output, std::span<const Var> wrt, bool create_graph) {
  if (output.value().size() != 1) {
    throw std::invalid_argument("grad: output must be 1x1, got " + output.value().shape_string());
  }
  std::unordered_set<const Node*> targets;
  for (const auto& w : wrt) targets.insert(w.node());

  // Iterative post-order DFS; reaches[n] says whether n depends on any target.
  std::unordered_map<const Node*, bool> reaches;
  std::vector<Var> order;
  if (output.requires_grad()) {
    std::vector<std::pair<Var, std::size_t>> stack;
    stack.emplace_back(output, 0);
    reaches.emplace(output.node(), false);
    while (!stack.empty()) {
      auto& [var, next] = stack.back();
      const auto& parents = var.node()->parents;
      if (next < parents.size()) {
        const Var parent = parents[next++];
        if (parent.requires_grad() && !reaches.contains(parent.node())) {
          reaches.emplace(parent.node(), false);
          stack.emplace_back(parent, 0);
        }
        continue;
      }
      bool r = targets.contains(var.node());
      for (const auto& p : parents) {
        auto it = reaches.find(p.node());
        if (it != reaches.end() && it->second) r = true;
      }
      reaches[var.node()] = r;
      order.push_back(var);
      stack.pop_back();
    }
  }

  GradMode mode(create_graph);
  std::unordered_map<const Node*, Var> grads;
  if (!order.empty() && reaches[output.node()]) {
    grads.emplace(output.node(), constant(Matrix(1, 1, 1.0)));
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const Node* node = it->node();
    if (!reaches[node] || node->parents.empty()) continue;
    auto g = grads.find(node);
    if (g == grads.end()) continue;
    std::vector<bool> needs(node->parents.size());
    bool any = false;
    for (std::size_t i = 0; i < needs.size(); ++i) {
      const auto& p = node->parents[i];
      needs[i] = p.requires_grad() && reaches[p.node()];
      any = any || needs[i];
    }
    if (!any) continue;
    const Var incoming = g->second;
    auto parent_grads = node->backward(*it, incoming, needs);
    for (std::size_t i = 0; i < needs.size(); ++i) {
      if (!needs[i] || !parent_grads[i].defined()) continue;
      const Node* p = node->parents[i].node();
      auto [slot, inserted] = grads.try_emplace(p, parent_grads[i]);
      if (!inserted) slot->second = slot->second + parent_grads[i];
    }
  }

  std::vector<Var> out;
  out.reserve(wrt.size());
  for (const auto& w : wrt) {
    auto g = grads.find(w.node());
    out.push_back(g != grads.end() ? g->second : zeros_like(w));
  }
  return out;
}

// ---------------------------------------------------------------- ops

namespace {

void require_same_shape(const Var& a, const Var& b, const char* op) {
  if (!a.value().same_shape(b.value())) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " + a.value().shape_string() +
                                " vs " + b.value().shape_string());
  }
}

template <typename F>
Matrix map(const Matrix& a, F f) {
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = f(a[i]);
  return out;
}

template <typename F>
Matrix zip(const Matrix& a, const Matrix& b, F f) {
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = f(a[i], b[i]);
  return out;
}

Matrix unary_kernel(kernels::Unary fn, const Matrix& a) {
  Matrix out(a.rows(), a.cols());
  kernels::parallel::unary(fn, a.span(), out.span());
  return out;
}

}  // namespace

Var matmul(const Var& a, const Var& b, bool trans_a, bool trans_b) {
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  kernels::GemmShape s;
  s.trans_a = trans_a;
  s.trans_b = trans_b;
  s.m = trans_a ? av.cols() : av.rows();
  s.k = trans_a ? av.rows() : av.cols();
  const std::size_t kb = trans_b ? bv.cols() : bv.rows();
  s.n = trans_b ? bv.rows() : bv.cols();
  if (s.k != kb) {
    throw std::invalid_argument("matmul: inner dimensions differ (" + av.shape_string() +
                                (trans_a ? "^T" : "") + " * " + bv.shape_string() +
                                (trans_b ? "^T" : "") + ")");
  }
  Matrix out(s.m, s.n);
  kernels::parallel::gemm(s, av.span(), bv.span(), out.span());
  return make_node(std::move(out), {a, b},
                   [trans_a, trans_b](const Var& self, const Var& g, const std::vector<bool>& needs) {
                     const Var& A = self.node()->parents[0];
                     const Var& B = self.node()->parents[1];
                     std::vector<Var> r(2);
                     if (needs[0]) r[0] = trans_a ? matmul(B, g, trans_b, true) : matmul(g, B, false, !trans_b);
                     if (needs[1]) r[1] = trans_b ? matmul(g, A, true, trans_a) : matmul(A, g, !trans_a, false);
                     return r;
                   });
}

Var operator+(const Var& a, const Var& b) {
  require_same_shape(a, b, "add");
  return make_node(zip(a.value(), b.value(), [](double x, double y) { return x + y; }), {a, b},
                   [](const Var&, const Var& g, const std::vector<bool>&) {
                     return std::vector<Var>{g, g};
                   });
}

Var operator-(const Var& a, const Var& b) {
  require_same_shape(a, b, "sub");
  return make_node(zip(a.value(), b.value(), [](double x, double y) { return x - y; }), {a, b},
                   [](const Var&, const Var& g, const std::vector<bool>& needs) {
                     std::vector<Var> r(2);
                     r[0] = g;
                     if (needs[1]) r[1] = -g;
                     return r;
                   });
}

Var operator*(const Var& a, const Var& b) {
  require_same_shape(a, b, "mul");
  return make_node(zip(a.value(), b.value(), [](double x, double y) { return x * y; }), {a, b},
                   [](const Var& self, const Var& g, const std::vector<bool>& needs) {
                     const auto& p = self.node()->parents;
                     std::vector<Var> r(2);
                     if (needs[0]) r[0] = g * p[1];
                     if (needs[1]) r[1] = g * p[0];
                     return r;
                   });
}

Var operator-(const Var& a) { return scale(a, -1.0); }

Var scale(const Var& a, double s) {
  return make_node(map(a.value(), [s](double x) { return s * x; }), {a},
                   [s](const Var&, const Var& g, const std::vector<bool>&) {
                     return std::vector<Var>{scale(g, s)};
                   });
}

Var add_scalar(const Var& a, double s) {
  return make_node(map(a.value(), [s](double x) { return x + s; }), {a},
                   [](const Var&, const Var& g, const std::vector<bool>&) {
                     return std::vector<Var>{g};
                   });
}

Var one_minus(const Var& a) { return add_scalar(scale(a, -1.0), 1.0); }

Var add_row(const Var& a, const Var& row) {
  const Matrix& av = a.value();
  const Matrix& rv = row.value();
  if (rv.rows() != 1 || rv.cols() != av.cols()) {
    throw std::invalid_argument("add_row: row " + rv.shape_string() + " does not fit " +
                                av.shape_string());
  }
  Matrix out = av;
  for (std::size_t r = 0; r < av.rows(); ++r) {
    for (std::size_t c = 0; c < av.cols(); ++c) out(r, c) += rv[c];
  }
  return make_node(std::move(out), {a, row},
                   [](const Var&, const Var& g, const std::vector<bool>& needs) {
                     std::vector<Var> r(2);
                     r[0] = g;
                     if (needs[1]) r[1] = sum_rows(g);
                     return r;
                   });
}

Var sum_rows(const Var& a) {
  const Matrix& av = a.value();
  Matrix out(1, av.cols());
  for (std::size_t r = 0; r < av.rows(); ++r) {
    for (std::size_t c = 0; c < av.cols(); ++c) out[c] += av(r, c);
  }
  const std::size_t rows = av.rows();
  return make_node(std::move(out), {a}, [rows](const Var&, const Var& g, const std::vector<bool>&) {
    return std::vector<Var>{broadcast_rows(g, rows)};
  });
}

Var broadcast_rows(const Var& row, std::size_t rows) {
  const Matrix& rv = row.value();
  if (rv.rows() != 1) throw std::invalid_argument("broadcast_rows: expects a single row");
  Matrix out(rows, rv.cols());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < rv.cols(); ++c) out(r, c) = rv[c];
  }
  return make_node(std::move(out), {row}, [](const Var&, const Var& g, const std::vector<bool>&) {
    return std::vector<Var>{sum_rows(g)};
  });
}

Var sum_cols(const Var& a) {
  const Matrix& av = a.value();
  Matrix out(av.rows(), 1);
  for (std::size_t r = 0; r < av.rows(); ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < av.cols(); ++c) s += av(r, c);
    out[r] = s;
  }
  const std::size_t cols = av.cols();
  return make_node(std::move(out), {a}, [cols](const Var&, const Var& g, const std::vector<bool>&) {
    return std::vector<Var>{broadcast_cols(g, cols)};
  });
}

Var broadcast_cols(const Var& col, std::size_t cols) {
  const Matrix& cv = col.value();
  if (cv.cols() != 1) throw std::invalid_argument("broadcast_cols: expects a single column");
  Matrix out(cv.rows(), cols);
  for (std::size_t r = 0; r < cv.rows(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) out(r, c) = cv[r];
  }
  return make_node(std::move(out), {col}, [](const Var&, const Var& g, const std::vector<bool>&) {
    return std::vector<Var>{sum_cols(g)};
  });
}

Var sum(const Var& a) {
  double s = 0.0;
  for (double v : a.value().values()) s += v;
  const std::size_t rows = a.rows();
  const std::size_t cols = a.cols();
  return make_node(Matrix(1, 1, s), {a},
                   [rows, cols](const Var&, const Var& g, const std::vector<bool>&) {
                     return std::vector<Var>{broadcast_scalar(g, rows, cols)};
                   });
}

Var mean(const Var& a) {
  const std::size_t n = a.value().size();
  if (n == 0) throw std::invalid_argument("mean of an empty matrix");
  double s = 0.0;
  for (double v : a.value().values()) s += v;
  const std::size_t rows = a.rows();
  const std::size_t cols = a.cols();
  return make_node(Matrix(1, 1, s / static_cast<double>(n)), {a},
                   [rows, cols, n](const Var&, const Var& g, const std::vector<bool>&) {
                     return std::vector<Var>{
                         broadcast_scalar(scale(g, 1.0 / static_cast<double>(n)), rows, cols)};
                   });
}

Var broadcast_scalar(const Var& s, std::size_t rows, std::size_t cols) {
  if (s.value().size() != 1) throw std::invalid_argument("broadcast_scalar: expects 1x1");
  return make_node(Matrix(rows, cols, s.value()[0]), {s},
                   [](const Var&, const Var& g, const std::vector<bool>&) {
                     return std::vector<Var>{sum(g)};
                   });
}

Var sigmoid(const Var& a) {
  return make_node(unary_kernel(kernels::Unary::sigmoid, a.value()), {a},
                   [](const Var& self, const Var& g, const std::vector<bool>&) {
                     return std::vector<Var>{g * (self * one_minus(self))};
                   });
}

Var tanh(const Var& a) {
  return make_node(unary_kernel(kernels::Unary::tanh, a.value()), {a},
                   [](const Var& self, const Var& g, const std::vector<bool>&) {
                     return std::vector<Var>{g * one_minus(self * self)};
                   });
}

Var log(const Var& a) {
  return make_node(map(a.value(), [](double x) { return std::log(x); }), {a},
                   [](const Var& self, const Var& g, const std::vector<bool>&) {
                     return std::vector<Var>{g * reciprocal(self.node()->parents[0])};
                   });
}

Var reciprocal(const Var& a) {
  return make_node(map(a.value(), [](double x) { return 1.0 / x; }), {a},
                   [](const Var& self, const Var& g, const std::vector<bool>&) {
                     return std::vector<Var>{-(g * (self * self))};
                   });
}

Var sqrt(const Var& a) {
  return make_node(map(a.value(), [](double x) { return std::sqrt(x); }), {a},
                   [](const Var& self, const Var& g, const std::vector<bool>&) {
                     // 0.5 / sqrt(x), kept differentiable; zero where sqrt(x) == 0
                     const Matrix zero = map(self.value(), [](double s) { return s > 0.0 ? 0.0 : 1.0; });
                     const Matrix positive = map(self.value(), [](double s) { return s > 0.0 ? 1.0 : 0.0; });
                     const Var factor = scale(reciprocal(self + constant(zero)), 0.5) * constant(positive);
                     return std::vector<Var>{g * factor};
                   });
}

Var relu(const Var& a) {
  return make_node(map(a.value(), [](double x) { return x > 0.0 ? x : 0.0; }), {a},
                   [](const Var& self, const Var& g, const std::vector<bool>&) {
                     const Matrix mask = map(self.node()->parents[0].value(),
                                             [](double x) { return x > 0.0 ? 1.0 : 0.0; });
                     return std::vector<Var>{g * constant(mask)};
                   });
}

Var square(const Var& a) { return a * a; }

Var clamp(const Var& a, double lo, double hi) {
  return make_node(map(a.value(), [lo, hi](double x) { return std::clamp(x, lo, hi); }), {a},
                   [lo, hi](const Var& self, const Var& g, const std::vector<bool>&) {
                     const Matrix mask = map(self.node()->parents[0].value(), [lo, hi](double x) {
                       return (x >= lo && x <= hi) ? 1.0 : 0.0;
                     });
                     return std::vector<Var>{g * constant(mask)};
                   });
}

Var softmax_rows(const Var& a) {
  const Matrix& av = a.value();
  Matrix out(av.rows(), av.cols());
  kernels::parallel::softmax_rows(av.rows(), av.cols(), av.span(), out.span());
  return make_node(std::move(out), {a}, [](const Var& self, const Var& g, const std::vector<bool>&) {
    const Var dot = sum_cols(g * self);
    return std::vector<Var>{self * (g - broadcast_cols(dot, self.cols()))};
  });
}

}  // namespace lipgan::ad
