#pragma once

// Recurrent generator and critic over softmax-relaxed token sequences.
//
// Everything is batched: a sequence batch is T matrices of shape (B x V),
// one per time step. Real sentences enter as one-hot rows, generated ones as
// probability rows, so the critic sees both through the same differentiable
// path.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lipgan/autodiff.hpp"
#include "lipgan/corpus.hpp"
#include "lipgan/rng.hpp"

namespace lipgan {

enum class CellKind { gru, lstm };

CellKind parse_cell_kind(std::string_view text);
std::string_view to_string(CellKind kind);

struct NamedParam {
  std::string name;
  ad::Var var;
};

/// Gate order: GRU (update z, reset r, candidate h); LSTM (input i, forget f,
/// output o, candidate g).
struct RecurrentCell {
  CellKind kind = CellKind::gru;
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  std::vector<ad::Var> input_weights;      // hidden x input, one per gate
  std::vector<ad::Var> recurrent_weights;  // hidden x hidden
  std::vector<ad::Var> biases;             // 1 x hidden

  static std::size_t gate_count(CellKind kind) { return kind == CellKind::gru ? 3 : 4; }

  /// Weights uniform in [-1/sqrt(hidden), 1/sqrt(hidden)], biases zero.
  static RecurrentCell create(CellKind kind, std::size_t input_dim, std::size_t hidden_dim, Rng& rng);
  static RecurrentCell zeros(CellKind kind, std::size_t input_dim, std::size_t hidden_dim);

  void validate() const;
  void append_parameters(const std::string& prefix, std::vector<NamedParam>& out) const;
};

struct CellState {
  ad::Var h;
  ad::Var c;  // LSTM only
};

/// z = s(x Wz' + h Uz' + bz), r = s(x Wr' + h Ur' + br),
/// n = tanh(x Wh' + (r.h) Uh' + bh), h' = (1 - z).h + z.n
ad::Var gru_step(const RecurrentCell& cell, const ad::Var& x, const ad::Var& h);

/// c' = f.c + i.g, h' = o.tanh(c')
CellState lstm_step(const RecurrentCell& cell, const ad::Var& x, const ad::Var& h, const ad::Var& c);

CellState cell_step(const RecurrentCell& cell, const ad::Var& x, const CellState& state);

struct ModelShape {
  CellKind cell = CellKind::gru;
  std::size_t vocab_size = 0;
  std::size_t hidden_dim = 32;
  std::size_t layers = 1;
  std::size_t noise_dim = 16;
};

/// T steps of (B x V) rows plus the valid length of every sample.
struct SoftBatch {
  std::vector<ad::Var> steps;
  std::vector<std::size_t> lengths;

  std::size_t batch_size() const { return lengths.size(); }
  std::size_t length() const { return steps.size(); }
  std::size_t width() const { return steps.empty() ? 0 : steps.front().cols(); }
  bool full_length() const;
  /// Sample `i` as a (T x V) matrix.
  ad::Matrix sample(std::size_t i) const;
};

/// One-hot batch; each window is a prefix of a sentence, padded with `pad` to
/// the longest window.
SoftBatch one_hot_batch(std::span<const Sentence> windows, std::size_t vocab_size, TokenId pad);

/// Builds a batch from per-sample (T x V) matrices of equal shape.
SoftBatch batch_from_samples(std::span<const ad::Matrix> samples, bool requires_grad = false);

class Generator {
 public:
  static Generator create(const ModelShape& shape, Rng& rng);

  const ModelShape& shape() const { return shape_; }
  std::vector<NamedParam> parameters() const;

  std::vector<RecurrentCell> layers;
  ad::Var noise_weight;  // hidden x noise
  ad::Var noise_bias;    // 1 x hidden
  ad::Var out_weight;    // vocab x hidden
  ad::Var out_bias;      // 1 x vocab

 private:
  ModelShape shape_;
};

class Critic {
 public:
  static Critic create(const ModelShape& shape, bool sigmoid_output, Rng& rng);

  const ModelShape& shape() const { return shape_; }
  bool sigmoid_output() const { return sigmoid_output_; }
  std::vector<NamedParam> parameters() const;

  std::vector<RecurrentCell> layers;
  ad::Var out_weight;  // 1 x hidden
  ad::Var out_bias;    // 1 x 1

 private:
  ModelShape shape_;
  bool sigmoid_output_ = false;
};

/// B x noise_dim spherical Gaussian draws.
ad::Matrix sample_noise(Rng& rng, std::size_t batch, std::size_t noise_dim);

/// Autoregressive rollout of `length` steps. The first layer's initial state
/// is tanh(z Wn' + bn). Step 0 reads a zero vector; step t reads the emitted
/// row of step t-1. Where `teacher` supplies a token for position t the
/// emitted row is that token's one-hot instead of the softmax. `teacher` is
/// empty or holds one (possibly empty) prefix per sample. When `inputs` is
/// given it receives the per-step input matrices.
SoftBatch generate(const Generator& gen, const ad::Matrix& noise, std::size_t length,
                   std::span<const Sentence> teacher = {}, std::vector<ad::Matrix>* inputs = nullptr);

/// B x 1 scores; recurrence for sample i stops after lengths[i] steps.
ad::Var critic_score(const Critic& critic, const SoftBatch& batch);

enum class SampleMode { argmax, multinomial };

/// Discretizes a (T x V) soft sequence; output stops before the first eos.
Sentence sample_hard(const ad::Matrix& sequence, SampleMode mode, Rng& rng, TokenId eos_id);

}  // namespace lipgan
