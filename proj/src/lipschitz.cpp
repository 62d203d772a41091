#include "lipgan/lipschitz.hpp"

#include <algorithm>
#include <cmath>

#include "lipgan/errors.hpp"

namespace lipgan {

using ad::Matrix;
using ad::Var;

TrainingMode parse_training_mode(std::string_view name, double lambda, double clip) {
  TrainingMode mode;
  if (name == "gan") {
    mode = GanMode{};
  } else if (name == "wgan-clip") {
    mode = Clip{clip};
  } else if (name == "wgan-gp") {
    mode = TwoSidedGP{lambda};
  } else if (name == "wgan-lp") {
    mode = OneSidedLP{lambda};
  } else {
    throw ConfigError("unknown mode '" + std::string(name) + "' (gan|wgan-clip|wgan-gp|wgan-lp)");
  }
  validate(mode);
  return mode;
}

std::string mode_name(const TrainingMode& mode) {
  struct {
    std::string operator()(const GanMode&) const { return "gan"; }
    std::string operator()(const Clip&) const { return "wgan-clip"; }
    std::string operator()(const TwoSidedGP&) const { return "wgan-gp"; }
    std::string operator()(const OneSidedLP&) const { return "wgan-lp"; }
  } visitor;
  return std::visit(visitor, mode);
}

void validate(const TrainingMode& mode) {
  if (const auto* c = std::get_if<Clip>(&mode); c && !(c->c > 0.0)) {
    throw ConfigError("clip value must be positive");
  }
  if (const auto* g = std::get_if<TwoSidedGP>(&mode); g && !(g->lambda > 0.0)) {
    throw ConfigError("lambda must be positive");
  }
  if (const auto* l = std::get_if<OneSidedLP>(&mode); l && !(l->lambda > 0.0)) {
    throw ConfigError("lambda must be positive");
  }
}

InterpolantBatch interpolate(const SoftBatch& real, const SoftBatch& fake, std::span<const double> eps) {
  if (real.batch_size() != fake.batch_size() || real.length() != fake.length() ||
      real.width() != fake.width()) {
    throw Error("interpolate: real and fake batches differ in shape");
  }
  if (real.lengths != fake.lengths) throw Error("interpolate: real and fake sample lengths differ");
  if (eps.size() != real.batch_size()) throw Error("interpolate: one epsilon per sample");
  InterpolantBatch out;
  out.epsilons.assign(eps.begin(), eps.end());
  out.points.lengths = real.lengths;
  for (std::size_t t = 0; t < real.length(); ++t) {
    const Matrix& x = real.steps[t].value();
    const Matrix& y = fake.steps[t].value();
    if (!x.same_shape(y)) throw Error("interpolate: step shapes differ");
    Matrix p(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const double e = eps[i];
      for (std::size_t v = 0; v < x.cols(); ++v) p(i, v) = e * x(i, v) + (1.0 - e) * y(i, v);
    }
    out.points.steps.push_back(Var(std::move(p), true));
  }
  return out;
}

InterpolantBatch interpolate(const SoftBatch& real, const SoftBatch& fake, Rng& rng) {
  std::vector<double> eps(real.batch_size());
  for (auto& e : eps) e = rng.uniform();
  return interpolate(real, fake, eps);
}

GradNorms grad_norm(const ScoreFn& score, const SoftBatch& points, bool create_graph) {
  if (points.batch_size() == 0 || points.length() == 0) throw Error("grad_norm: empty batch");
  SoftBatch leaves;
  leaves.lengths = points.lengths;
  for (const auto& s : points.steps) leaves.steps.push_back(Var(s.value(), true));

  GradNorms out;
  {
    // The score graph must be recorded even if the caller disabled grad mode.
    ad::GradMode record(true);
    const Var total = ad::sum(score(leaves));
    out.grads = ad::grad(total, leaves.steps, create_graph);
  }
  ad::GradMode mode(create_graph && ad::grad_enabled());
  Var squared = ad::sum_cols(ad::square(out.grads[0]));
  for (std::size_t t = 1; t < out.grads.size(); ++t) squared = squared + ad::sum_cols(ad::square(out.grads[t]));
  out.norms = ad::sqrt(squared);
  return out;
}

GradNorms grad_norm(const Critic& critic, const SoftBatch& points, bool create_graph) {
  if (critic.sigmoid_output()) throw Error("penalty undefined for sigmoid critic");
  return grad_norm([&critic](const SoftBatch& b) { return critic_score(critic, b); }, points, create_graph);
}

namespace {

void check_norms(const Var& norms) {
  if (norms.value().size() == 0) throw Error("penalty: empty batch");
  for (double n : norms.value().values()) {
    if (!(n >= 0.0)) throw Error("penalty: gradient norms must be non-negative");
  }
}

}  // namespace

Var penalty_two_sided(const Var& norms, double lambda) {
  check_norms(norms);
  return ad::scale(ad::mean(ad::square(ad::add_scalar(norms, -1.0))), lambda);
}

Var penalty_one_sided(const Var& norms, double lambda) {
  check_norms(norms);
  return ad::scale(ad::mean(ad::square(ad::relu(ad::add_scalar(norms, -1.0)))), lambda);
}

double penalty_two_sided(std::span<const double> norms, double lambda) {
  ad::NoGrad off;
  return penalty_two_sided(ad::constant(Matrix(norms.size(), 1, std::vector<double>(norms.begin(), norms.end()))), lambda).item();
}

double penalty_one_sided(std::span<const double> norms, double lambda) {
  ad::NoGrad off;
  return penalty_one_sided(ad::constant(Matrix(norms.size(), 1, std::vector<double>(norms.begin(), norms.end()))), lambda).item();
}

void clip_weights(std::span<const NamedParam> params, double c) {
  if (!(c > 0.0)) throw Error("clip_weights: c must be positive");
  for (const auto& p : params) {
    Var v = p.var;
    for (auto& x : v.mutable_value().span()) x = std::min(c, std::max(-c, x));
  }
}

double max_abs(std::span<const NamedParam> params) {
  double m = 0.0;
  for (const auto& p : params) {
    for (double x : p.var.value().values()) m = std::max(m, std::abs(x));
  }
  return m;
}

}  // namespace lipgan
