#include "lipgan/objectives.hpp"

#include <cmath>

#include "lipgan/errors.hpp"

namespace lipgan {

using ad::Matrix;
using ad::Var;

namespace {

void check_probabilities(const Var& v, const char* what) {
  for (double x : v.value().values()) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw Error(std::string("gan_losses: ") + what + " value outside [0, 1]");
    }
  }
}

Var clamped_log(const Var& p) { return ad::log(ad::clamp(p, kProbabilityFloor, 1.0 - kProbabilityFloor)); }

Var column(std::span<const double> xs) {
  return ad::constant(Matrix(xs.size(), 1, std::vector<double>(xs.begin(), xs.end())));
}

bool all_finite(const Matrix& m) {
  for (double x : m.values()) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

std::vector<Var> vars_of(std::span<const NamedParam> params) {
  std::vector<Var> out;
  out.reserve(params.size());
  for (const auto& p : params) out.push_back(p.var);
  return out;
}

std::vector<Matrix> values_of(const std::vector<Var>& grads) {
  std::vector<Matrix> out;
  out.reserve(grads.size());
  for (const auto& g : grads) out.push_back(g.value());
  return out;
}

}  // namespace

LossPair gan_losses(const Var& d_real, const Var& d_fake) {
  check_probabilities(d_real, "d_real");
  check_probabilities(d_fake, "d_fake");
  const Var critic = -(ad::mean(clamped_log(d_real)) + ad::mean(clamped_log(ad::one_minus(d_fake))));
  return {critic, gan_generator_loss(d_fake)};
}

Var gan_generator_loss(const Var& d_fake) {
  check_probabilities(d_fake, "d_fake");
  return -ad::mean(clamped_log(d_fake));
}

LossPair wgan_losses(const Var& f_real, const Var& f_fake, const Var& penalty) {
  const Var critic = (ad::mean(f_fake) - ad::mean(f_real)) + penalty;
  return {critic, wgan_generator_loss(f_fake)};
}

Var wgan_generator_loss(const Var& f_fake) { return -ad::mean(f_fake); }

ScalarLosses gan_losses(std::span<const double> d_real, std::span<const double> d_fake) {
  ad::NoGrad off;
  const auto l = gan_losses(column(d_real), column(d_fake));
  return {l.critic.item(), l.generator.item()};
}

ScalarLosses wgan_losses(std::span<const double> f_real, std::span<const double> f_fake, double penalty) {
  ad::NoGrad off;
  const auto l = wgan_losses(column(f_real), column(f_fake), ad::constant(Matrix(1, 1, penalty)));
  return {l.critic.item(), l.generator.item()};
}

// ------------------------------------------------------------------ Adam

void AdamConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("adam: learning rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("adam: betas must lie in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw ConfigError("adam: epsilon must be positive");
}

Adam::Adam(AdamConfig config, std::span<const NamedParam> params) : config_(config) {
  config_.validate();
  for (const auto& p : params) {
    m_.emplace_back(p.var.rows(), p.var.cols());
    v_.emplace_back(p.var.rows(), p.var.cols());
  }
}

void Adam::step(std::span<const NamedParam> params, std::span<const Matrix> grads) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw Error("adam: parameter count differs from optimizer state");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!grads[i].same_shape(m_[i]) || !params[i].var.value().same_shape(m_[i])) {
      throw Error("adam: shape mismatch for '" + params[i].name + "'");
    }
    if (!all_finite(grads[i])) throw NonFiniteGradient(params[i].name);
  }
  ++t_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Var p = params[i].var;
    auto values = p.mutable_value().span();
    auto m = m_[i].span();
    auto v = v_[i].span();
    const auto g = grads[i].span();
    for (std::size_t k = 0; k < values.size(); ++k) {
      m[k] = b1 * m[k] + (1.0 - b1) * g[k];
      v[k] = b2 * v[k] + (1.0 - b2) * g[k] * g[k];
      const double mhat = m[k] / c1;
      const double vhat = v[k] / c2;
      values[k] -= config_.learning_rate * mhat / (std::sqrt(vhat) + config_.epsilon);
    }
  }
}

// ------------------------------------------------------------------ training

void TrainConfig::validate() const {
  lipgan::validate(mode);
  if (n_critic < 1) throw ConfigError("n_critic must be at least 1");
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  critic_adam.validate();
  generator_adam.validate();
  schedule.validate();
}

TrainState TrainState::create(const ModelShape& shape, const TrainConfig& config, std::uint64_t seed) {
  config.validate();
  Rng init(derive_seed(seed, 1));
  TrainState s{
      .generator = Generator::create(shape, init),
      .critic = Critic::create(shape, is_gan(config.mode), init),
      .generator_opt = {},
      .critic_opt = {},
      .iteration = 0,
      .stage = initial_stage(config.schedule),
      .rng = Rng(derive_seed(seed, 2)),
  };
  s.generator_opt = Adam(config.generator_adam, s.generator.parameters());
  s.critic_opt = Adam(config.critic_adam, s.critic.parameters());
  return s;
}

RealSampler::RealSampler(const TokenizedCorpus& corpus, std::size_t max_length)
    : corpus_(&corpus), by_length_(max_length + 1) {
  for (std::size_t i = 0; i < corpus.sentences.size(); ++i) {
    const std::size_t n = std::min(corpus.sentences[i].size(), max_length);
    for (std::size_t len = 1; len <= n; ++len) by_length_[len].push_back(i);
  }
  if (max_length >= 1 && by_length_[max_length].empty()) {
    throw ConfigError("training corpus has no sentence of length >= " + std::to_string(max_length));
  }
}

const Sentence& RealSampler::draw(std::size_t min_length, Rng& rng) const {
  if (min_length == 0 || min_length >= by_length_.size() || by_length_[min_length].empty()) {
    throw Error("no training sentence of length >= " + std::to_string(min_length));
  }
  const auto& bucket = by_length_[min_length];
  return corpus_->sentences[bucket[rng.uniform_int(0, bucket.size() - 1)]];
}

CriticObjective critic_objective(const Critic& critic, const SoftBatch& real, const SoftBatch& fake,
                                 const TrainingMode& mode, std::span<const double> eps) {
  CriticObjective out;
  const Var s_real = critic_score(critic, real);
  const Var s_fake = critic_score(critic, fake);
  if (is_gan(mode)) {
    out.loss = gan_losses(s_real, s_fake).critic;
    return out;
  }
  Var penalty = ad::constant(Matrix(1, 1));
  if (const auto* gp = std::get_if<TwoSidedGP>(&mode)) {
    const auto points = interpolate(real, fake, eps);
    out.norms = grad_norm(critic, points.points, true).norms;
    penalty = penalty_two_sided(out.norms, gp->lambda);
  } else if (const auto* lp = std::get_if<OneSidedLP>(&mode)) {
    const auto points = interpolate(real, fake, eps);
    out.norms = grad_norm(critic, points.points, true).norms;
    penalty = penalty_one_sided(out.norms, lp->lambda);
  }
  out.penalty = penalty;
  out.loss = wgan_losses(s_real, s_fake, penalty).critic;
  return out;
}

namespace {

struct Minibatch {
  SoftBatch real;
  SoftBatch fake;
};

// Draw order per sample: length, sentence, teacher coin; then the noise block.
// Everything comes from state.rng so a checkpointed run replays exactly.
Minibatch assemble(TrainState& state, const TrainConfig& config, const RealSampler& sampler,
                   bool need_real) {
  const std::size_t B = config.batch_size;
  const auto& shape = state.generator.shape();
  std::vector<std::size_t> lengths(B);
  std::vector<Sentence> windows(B);
  std::vector<Sentence> prefixes(B);
  bool any_teacher = false;
  for (std::size_t i = 0; i < B; ++i) {
    lengths[i] = sample_length(state.stage, config.schedule.variable_length, state.rng);
    if (need_real || state.stage.teacher_ratio > 0.0) {
      const Sentence& s = sampler.draw(lengths[i], state.rng);
      windows[i].assign(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(lengths[i]));
      if (auto p = teacher_prefix(s, lengths[i], state.stage, state.rng)) {
        prefixes[i] = std::move(*p);
        any_teacher = true;
      }
    }
  }
  std::size_t longest = 0;
  for (auto len : lengths) longest = std::max(longest, len);
  const Matrix noise = sample_noise(state.rng, B, shape.noise_dim);

  Minibatch mb;
  mb.fake = generate(state.generator, noise, longest,
                     any_teacher ? std::span<const Sentence>(prefixes) : std::span<const Sentence>());
  mb.fake.lengths = lengths;
  if (need_real) mb.real = one_hot_batch(windows, shape.vocab_size, Vocabulary::kPadId);
  return mb;
}

}  // namespace

TrainingMetrics train_step(TrainState& state, const TrainConfig& config, const RealSampler& sampler) {
  TrainingMetrics metrics;
  metrics.stage_len = state.stage.current_max;
  metrics.teacher_ratio = state.stage.teacher_ratio;
  const bool penalized = std::holds_alternative<TwoSidedGP>(config.mode) ||
                         std::holds_alternative<OneSidedLP>(config.mode);
  const auto critic_params = state.critic.parameters();
  const auto gen_params = state.generator.parameters();
  const auto critic_vars = vars_of(critic_params);
  const auto gen_vars = vars_of(gen_params);

  double norm_total = 0.0;
  std::size_t norm_count = 0;
  try {
    for (std::size_t k = 0; k < config.n_critic; ++k) {
      Minibatch mb;
      {
        ad::NoGrad off;
        mb = assemble(state, config, sampler, true);
      }
      std::vector<double> eps;
      if (penalized) {
        eps.resize(config.batch_size);
        for (auto& e : eps) e = state.rng.uniform();
      }
      const auto obj = critic_objective(state.critic, mb.real, mb.fake, config.mode, eps);
      const double loss = obj.loss.item();
      metrics.critic_loss += loss;
      if (obj.penalty.defined()) metrics.penalty += obj.penalty.item();
      if (obj.norms.defined()) {
        for (double n : obj.norms.value().values()) norm_total += n;
        norm_count += obj.norms.value().size();
      }
      if (!std::isfinite(loss)) {
        metrics.nan = true;
        break;
      }
      const auto grads = ad::grad(obj.loss, critic_vars);
      state.critic_opt.step(critic_params, values_of(grads));
      if (const auto* clip = std::get_if<Clip>(&config.mode)) clip_weights(critic_params, clip->c);
      ++metrics.critic_updates;
    }
    if (metrics.critic_updates > 0) {
      metrics.critic_loss /= static_cast<double>(metrics.critic_updates);
      metrics.penalty /= static_cast<double>(metrics.critic_updates);
    }

    if (!metrics.nan) {
      const Minibatch mb = assemble(state, config, sampler, false);
      const Var score = critic_score(state.critic, mb.fake);
      const Var loss = is_gan(config.mode) ? gan_generator_loss(score) : wgan_generator_loss(score);
      metrics.gen_loss = loss.item();
      if (!std::isfinite(metrics.gen_loss)) {
        metrics.nan = true;
      } else {
        const auto grads = ad::grad(loss, gen_vars);
        state.generator_opt.step(gen_params, values_of(grads));
        ++metrics.generator_updates;
      }
    }
  } catch (const NonFiniteGradient&) {
    metrics.nan = true;
  }

  if (penalized && norm_count > 0) metrics.grad_norm_mean = norm_total / static_cast<double>(norm_count);
  ++state.iteration;
  metrics.iteration = state.iteration;
  state.stage = advance(state.stage, state.iteration, config.schedule);
  return metrics;
}

}  // namespace lipgan
