#pragma once

// Losses, Adam, and the alternating critic/generator update for the four
// training regimes.
//
// GAN mode optimizes the generator with the non-saturating surrogate
// -log D(G(z)) instead of minimizing log(1 - D(G(z))); the critic side is the
// usual cross-entropy of the minimax game.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lipgan/autodiff.hpp"
#include "lipgan/corpus.hpp"
#include "lipgan/curriculum.hpp"
#include "lipgan/lipschitz.hpp"
#include "lipgan/model.hpp"
#include "lipgan/rng.hpp"

namespace lipgan {

/// Floor used inside logs; probabilities are clamped to [eps, 1 - eps].
inline constexpr double kProbabilityFloor = 1e-7;

struct LossPair {
  ad::Var critic;
  ad::Var generator;
};

/// critic = -mean log d_real - mean log(1 - d_fake); generator = -mean log d_fake.
/// Values outside [0, 1] are an error.
LossPair gan_losses(const ad::Var& d_real, const ad::Var& d_fake);
ad::Var gan_generator_loss(const ad::Var& d_fake);

/// critic = mean f_fake - mean f_real + penalty; generator = -mean f_fake.
LossPair wgan_losses(const ad::Var& f_real, const ad::Var& f_fake, const ad::Var& penalty);
ad::Var wgan_generator_loss(const ad::Var& f_fake);

struct ScalarLosses {
  double critic = 0.0;
  double generator = 0.0;
};
ScalarLosses gan_losses(std::span<const double> d_real, std::span<const double> d_fake);
ScalarLosses wgan_losses(std::span<const double> f_real, std::span<const double> f_fake, double penalty);

// ------------------------------------------------------------------ Adam

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.5;
  double beta2 = 0.9;
  double epsilon = 1e-8;

  void validate() const;
};

class Adam {
 public:
  Adam() = default;
  Adam(AdamConfig config, std::span<const NamedParam> params);

  /// One bias-corrected update. Every gradient is checked before any
  /// parameter moves; a non-finite entry throws NonFiniteGradient.
  void step(std::span<const NamedParam> params, std::span<const ad::Matrix> grads);

  const AdamConfig& config() const { return config_; }
  std::uint64_t steps() const { return t_; }
  std::vector<ad::Matrix>& first_moments() { return m_; }
  std::vector<ad::Matrix>& second_moments() { return v_; }
  const std::vector<ad::Matrix>& first_moments() const { return m_; }
  const std::vector<ad::Matrix>& second_moments() const { return v_; }
  void set_steps(std::uint64_t t) { t_ = t; }

 private:
  AdamConfig config_;
  std::vector<ad::Matrix> m_;
  std::vector<ad::Matrix> v_;
  std::uint64_t t_ = 0;
};

// ------------------------------------------------------------------ training

struct TrainConfig {
  TrainingMode mode = OneSidedLP{10.0};
  std::size_t n_critic = 5;
  std::size_t batch_size = 128;
  AdamConfig critic_adam;
  AdamConfig generator_adam;
  CurriculumSchedule schedule;

  void validate() const;
};

struct TrainState {
  Generator generator;
  Critic critic;
  Adam generator_opt;
  Adam critic_opt;
  std::uint64_t iteration = 0;
  Stage stage;
  Rng rng;

  static TrainState create(const ModelShape& shape, const TrainConfig& config, std::uint64_t seed);
};

struct TrainingMetrics {
  std::uint64_t iteration = 0;  // completed iterations after this step
  std::size_t stage_len = 0;
  double critic_loss = 0.0;     // mean over the critic updates
  double gen_loss = 0.0;
  double penalty = 0.0;
  std::optional<double> grad_norm_mean;  // penalty modes only
  double teacher_ratio = 0.0;
  bool nan = false;
  std::size_t critic_updates = 0;
  std::size_t generator_updates = 0;
};

/// Uniform draws of training sentences long enough for a requested window.
class RealSampler {
 public:
  RealSampler(const TokenizedCorpus& corpus, std::size_t max_length);
  const Sentence& draw(std::size_t min_length, Rng& rng) const;

 private:
  const TokenizedCorpus* corpus_;
  std::vector<std::vector<std::size_t>> by_length_;  // [L] -> sentences with size >= L
};

struct CriticObjective {
  ad::Var loss;
  ad::Var penalty;  // undefined in gan / wgan-clip
  ad::Var norms;    // undefined in gan / wgan-clip
};

/// The mode-specific critic loss, differentiable in the critic parameters.
/// `eps` holds the interpolation weights and is ignored without a penalty.
CriticObjective critic_objective(const Critic& critic, const SoftBatch& real, const SoftBatch& fake,
                                 const TrainingMode& mode, std::span<const double> eps);

/// n_critic critic updates then one generator update.
TrainingMetrics train_step(TrainState& state, const TrainConfig& config, const RealSampler& sampler);

}  // namespace lipgan
