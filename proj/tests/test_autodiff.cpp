#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"
#include "lipgan/autodiff.hpp"
#include "lipgan/rng.hpp"
#include "oracles.hpp"

using namespace lipgan;
using ad::Matrix;
using ad::Var;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Matrix m(r, c);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = lo + (hi - lo) * rng.uniform();
  return m;
}

// Scalar probe loss sum(w . f(inputs)) so every output entry matters.
using UnaryOp = std::function<Var(const Var&)>;

double check_unary(const UnaryOp& op, Matrix x, Rng& rng) {
  const Matrix out = op(Var(x)).value();
  const Var probe = ad::constant(random_matrix(out.rows(), out.cols(), rng));
  auto loss_of = [&](const Var& in) { return ad::sum(op(in) * probe); };
  const Var leaf(x, true);
  const std::vector<Var> wrt{leaf};
  const auto g = ad::grad(loss_of(leaf), wrt);
  const auto fd = oracle::central_diff(x, [&] { return loss_of(Var(x)).item(); });
  return oracle::relative_error(g[0].value(), fd);
}

}  // namespace

TEST_SUITE("autodiff") {
  TEST_CASE("elementwise and reduction ops match finite differences") {
    Rng rng(1);
    const std::vector<std::pair<const char*, UnaryOp>> ops = {
        {"sigmoid", [](const Var& a) { return ad::sigmoid(a); }},
        {"tanh", [](const Var& a) { return ad::tanh(a); }},
        {"square", [](const Var& a) { return ad::square(a); }},
        {"scale", [](const Var& a) { return ad::scale(a, -2.5); }},
        {"add_scalar", [](const Var& a) { return ad::add_scalar(a, 3.0); }},
        {"one_minus", [](const Var& a) { return ad::one_minus(a); }},
        {"softmax_rows", [](const Var& a) { return ad::softmax_rows(a); }},
        {"sum_rows", [](const Var& a) { return ad::sum_rows(a); }},
        {"sum_cols", [](const Var& a) { return ad::sum_cols(a); }},
        {"mean", [](const Var& a) { return ad::mean(a); }},
        {"self product", [](const Var& a) { return a * ad::tanh(a); }},
        {"transpose matmul", [](const Var& a) { return ad::matmul(a, a, true, false); }},
        {"matmul_bt", [](const Var& a) { return ad::matmul(a, a, false, true); }},
        {"broadcast_rows", [](const Var& a) { return ad::broadcast_rows(ad::sum_rows(a), 4); }},
        {"broadcast_cols", [](const Var& a) { return ad::broadcast_cols(ad::sum_cols(a), 2); }},
        {"broadcast_scalar", [](const Var& a) { return ad::broadcast_scalar(ad::sum(a), 2, 2); }},
        {"add_row", [](const Var& a) { return ad::add_row(a, ad::sum_rows(ad::square(a))); }},
    };
    for (const auto& [name, op] : ops) {
      CAPTURE(name);
      CHECK(check_unary(op, random_matrix(3, 4, rng), rng) < 1e-8);
    }
  }

  TEST_CASE("positive-domain ops match finite differences") {
    Rng rng(2);
    const std::vector<std::pair<const char*, UnaryOp>> ops = {
        {"log", [](const Var& a) { return ad::log(a); }},
        {"reciprocal", [](const Var& a) { return ad::reciprocal(a); }},
        {"sqrt", [](const Var& a) { return ad::sqrt(a); }},
    };
    for (const auto& [name, op] : ops) {
      CAPTURE(name);
      CHECK(check_unary(op, random_matrix(3, 3, rng, 0.5, 2.0), rng) < 1e-8);
    }
  }

  TEST_CASE("piecewise ops use the active branch") {
    Rng rng(3);
    Matrix x(1, 4, {-0.7, -0.2, 0.3, 1.2});
    CHECK(check_unary([](const Var& a) { return ad::relu(a); }, x, rng) < 1e-8);
    CHECK(check_unary([](const Var& a) { return ad::clamp(a, -0.5, 0.5); }, x, rng) < 1e-8);
  }

  TEST_CASE("second derivatives through create_graph match differences of gradients") {
    Rng rng(4);
    Matrix w = random_matrix(3, 3, rng);
    const Matrix x = random_matrix(2, 3, rng);
    // inner: d/dx sum(tanh(x W')^2); outer: squared norm of the inner gradient,
    // differentiated with respect to W.
    auto outer = [&](const Var& wv, bool create) {
      const Var xv(x, true);
      const Var inner = ad::sum(ad::square(ad::tanh(ad::matmul(xv, wv, false, true))));
      const std::vector<Var> wrt{xv};
      const Var gx = ad::grad(inner, wrt, create)[0];
      return ad::sqrt(ad::sum(ad::square(gx)));
    };
    const Var wv(w, true);
    const std::vector<Var> wrt{wv};
    const auto g = ad::grad(outer(wv, true), wrt);
    const auto fd = oracle::central_diff(w, [&] { return outer(Var(w, true), false).item(); });
    CHECK(oracle::relative_error(g[0].value(), fd) < 1e-7);
  }

  TEST_CASE("unreachable inputs get zero gradients; NoGrad records nothing") {
    const Var a(Matrix(1, 2, {1.0, 2.0}), true);
    const Var b(Matrix(2, 2, 1.0), true);
    const std::vector<Var> wrt{a, b};
    const auto g = ad::grad(ad::sum(ad::square(a)), wrt);
    CHECK(g[0].value() == Matrix(1, 2, {2.0, 4.0}));
    CHECK(g[1].value() == Matrix(2, 2, 0.0));
    {
      ad::NoGrad off;
      const Var c = ad::square(a);
      CHECK_FALSE(c.requires_grad());
    }
    CHECK(ad::square(a).requires_grad());
  }

  TEST_CASE("mean is the exact quotient") {
    const Var a(Matrix(1, 3, {0.25, 0.0, 0.5}));
    CHECK(ad::mean(a).item() == 0.25);
  }

  TEST_CASE("shape mismatches throw") {
    const Var a(Matrix(2, 3));
    const Var b(Matrix(3, 2));
    CHECK_THROWS(a + b);
    CHECK_THROWS(ad::matmul(a, a));
  }
}
