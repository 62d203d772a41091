#pragma once

// Lipschitz enforcement for the Wasserstein critic: weight clipping, the
// two-sided gradient penalty lambda * E[(|grad f| - 1)^2], and the one-sided
// penalty lambda * E[max(0, |grad f| - 1)^2], plus the interpolant sampler
// the penalties are evaluated on.

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lipgan/autodiff.hpp"
#include "lipgan/model.hpp"
#include "lipgan/rng.hpp"

namespace lipgan {

struct Clip {
  double c = 0.01;
};
struct TwoSidedGP {
  double lambda = 10.0;
};
struct OneSidedLP {
  double lambda = 10.0;
};
using PenaltyMode = std::variant<Clip, TwoSidedGP, OneSidedLP>;

/// Plain GAN: sigmoid critic, no Lipschitz term.
struct GanMode {};
using TrainingMode = std::variant<GanMode, Clip, TwoSidedGP, OneSidedLP>;

/// Parses gan | wgan-clip | wgan-gp | wgan-lp; validates c > 0 and lambda > 0.
TrainingMode parse_training_mode(std::string_view name, double lambda, double clip);
std::string mode_name(const TrainingMode& mode);
void validate(const TrainingMode& mode);
inline bool is_gan(const TrainingMode& mode) { return std::holds_alternative<GanMode>(mode); }

struct InterpolantBatch {
  SoftBatch points;  // leaves with requires_grad set
  std::vector<double> epsilons;
};

/// x_hat = eps * real + (1 - eps) * fake with eps ~ U[0, 1] per sample.
InterpolantBatch interpolate(const SoftBatch& real, const SoftBatch& fake, Rng& rng);
InterpolantBatch interpolate(const SoftBatch& real, const SoftBatch& fake, std::span<const double> eps);

using ScoreFn = std::function<ad::Var(const SoftBatch&)>;

struct GradNorms {
  ad::Var norms;               // B x 1
  std::vector<ad::Var> grads;  // d(score)/d(points), per step
};

/// Per-sample Euclidean norm of the score gradient over all T x V inputs.
/// With create_graph the norms stay differentiable in the score parameters.
GradNorms grad_norm(const ScoreFn& score, const SoftBatch& points, bool create_graph = true);
/// Throws for a sigmoid critic: the penalty is undefined there.
GradNorms grad_norm(const Critic& critic, const SoftBatch& points, bool create_graph = true);

ad::Var penalty_two_sided(const ad::Var& norms, double lambda);
ad::Var penalty_one_sided(const ad::Var& norms, double lambda);
double penalty_two_sided(std::span<const double> norms, double lambda);
double penalty_one_sided(std::span<const double> norms, double lambda);

/// Projects every value into [-c, c].
void clip_weights(std::span<const NamedParam> params, double c);

/// Largest absolute value over all parameters.
double max_abs(std::span<const NamedParam> params);

}  // namespace lipgan
