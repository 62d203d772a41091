#include "lipgan/model.hpp"

#include <cmath>

#include "lipgan/errors.hpp"

namespace lipgan {

using ad::Matrix;
using ad::Var;

CellKind parse_cell_kind(std::string_view text) {
  if (text == "gru") return CellKind::gru;
  if (text == "lstm") return CellKind::lstm;
  throw ConfigError("unknown cell kind '" + std::string(text) + "'");
}

std::string_view to_string(CellKind kind) { return kind == CellKind::gru ? "gru" : "lstm"; }

namespace {

constexpr const char* kGruGates[] = {"z", "r", "h"};
constexpr const char* kLstmGates[] = {"i", "f", "o", "g"};

Matrix uniform_matrix(std::size_t rows, std::size_t cols, double bound, Rng& rng) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = (2.0 * rng.uniform() - 1.0) * bound;
  return m;
}

Var param(Matrix m) { return Var(std::move(m), true); }

Var affine(const Var& x, const Var& w, const Var& b) { return ad::add_row(ad::matmul(x, w, false, true), b); }

Var gate_preact(const RecurrentCell& cell, std::size_t g, const Var& x, const Var& h) {
  return ad::add_row(ad::matmul(x, cell.input_weights[g], false, true) +
                         ad::matmul(h, cell.recurrent_weights[g], false, true),
                     cell.biases[g]);
}

void check_step_dims(const RecurrentCell& cell, const Var& x, const Var& h) {
  if (x.cols() != cell.input_dim || h.cols() != cell.hidden_dim || x.rows() != h.rows()) {
    throw Error("recurrent step: dimension mismatch (x " + x.value().shape_string() + ", h " +
                h.value().shape_string() + ", cell " + std::to_string(cell.input_dim) + "->" +
                std::to_string(cell.hidden_dim) + ")");
  }
}

void append_cell_params(const std::vector<RecurrentCell>& layers, const std::string& prefix,
                        std::vector<NamedParam>& out) {
  for (std::size_t l = 0; l < layers.size(); ++l) {
    layers[l].append_parameters(prefix + ".l" + std::to_string(l), out);
  }
}

std::vector<RecurrentCell> make_layers(const ModelShape& shape, Rng& rng) {
  std::vector<RecurrentCell> layers;
  for (std::size_t l = 0; l < shape.layers; ++l) {
    const std::size_t in = l == 0 ? shape.vocab_size : shape.hidden_dim;
    layers.push_back(RecurrentCell::create(shape.cell, in, shape.hidden_dim, rng));
  }
  return layers;
}

void check_shape(const ModelShape& shape) {
  if (shape.vocab_size == 0 || shape.hidden_dim == 0 || shape.layers == 0 || shape.noise_dim == 0) {
    throw ConfigError("model shape: vocab, hidden, layers and noise_dim must be positive");
  }
}

}  // namespace

// ------------------------------------------------------------ cells

RecurrentCell RecurrentCell::create(CellKind kind, std::size_t input_dim, std::size_t hidden_dim, Rng& rng) {
  RecurrentCell cell;
  cell.kind = kind;
  cell.input_dim = input_dim;
  cell.hidden_dim = hidden_dim;
  const double k = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
  for (std::size_t g = 0; g < gate_count(kind); ++g) {
    cell.input_weights.push_back(param(uniform_matrix(hidden_dim, input_dim, k, rng)));
    cell.recurrent_weights.push_back(param(uniform_matrix(hidden_dim, hidden_dim, k, rng)));
    cell.biases.push_back(param(Matrix(1, hidden_dim)));
  }
  return cell;
}

RecurrentCell RecurrentCell::zeros(CellKind kind, std::size_t input_dim, std::size_t hidden_dim) {
  RecurrentCell cell;
  cell.kind = kind;
  cell.input_dim = input_dim;
  cell.hidden_dim = hidden_dim;
  for (std::size_t g = 0; g < gate_count(kind); ++g) {
    cell.input_weights.push_back(param(Matrix(hidden_dim, input_dim)));
    cell.recurrent_weights.push_back(param(Matrix(hidden_dim, hidden_dim)));
    cell.biases.push_back(param(Matrix(1, hidden_dim)));
  }
  return cell;
}

void RecurrentCell::validate() const {
  const std::size_t gates = gate_count(kind);
  if (input_weights.size() != gates || recurrent_weights.size() != gates || biases.size() != gates) {
    throw Error("recurrent cell: wrong number of gates");
  }
  for (std::size_t g = 0; g < gates; ++g) {
    if (input_weights[g].rows() != hidden_dim || input_weights[g].cols() != input_dim ||
        recurrent_weights[g].rows() != hidden_dim || recurrent_weights[g].cols() != hidden_dim ||
        biases[g].rows() != 1 || biases[g].cols() != hidden_dim) {
      throw Error("recurrent cell: gate " + std::to_string(g) + " matrices do not conform");
    }
  }
}

void RecurrentCell::append_parameters(const std::string& prefix, std::vector<NamedParam>& out) const {
  for (std::size_t g = 0; g < gate_count(kind); ++g) {
    const std::string gate = kind == CellKind::gru ? kGruGates[g] : kLstmGates[g];
    out.push_back({prefix + ".W_" + gate, input_weights[g]});
    out.push_back({prefix + ".U_" + gate, recurrent_weights[g]});
    out.push_back({prefix + ".b_" + gate, biases[g]});
  }
}

Var gru_step(const RecurrentCell& cell, const Var& x, const Var& h) {
  if (cell.kind != CellKind::gru) throw Error("gru_step: cell is not a GRU");
  check_step_dims(cell, x, h);
  const Var z = ad::sigmoid(gate_preact(cell, 0, x, h));
  const Var r = ad::sigmoid(gate_preact(cell, 1, x, h));
  const Var n = ad::tanh(gate_preact(cell, 2, x, r * h));
  return ad::one_minus(z) * h + z * n;
}

CellState lstm_step(const RecurrentCell& cell, const Var& x, const Var& h, const Var& c) {
  if (cell.kind != CellKind::lstm) throw Error("lstm_step: cell is not an LSTM");
  check_step_dims(cell, x, h);
  if (!c.value().same_shape(h.value())) throw Error("lstm_step: cell state shape differs from h");
  const Var i = ad::sigmoid(gate_preact(cell, 0, x, h));
  const Var f = ad::sigmoid(gate_preact(cell, 1, x, h));
  const Var o = ad::sigmoid(gate_preact(cell, 2, x, h));
  const Var g = ad::tanh(gate_preact(cell, 3, x, h));
  const Var c_next = f * c + i * g;
  return {o * ad::tanh(c_next), c_next};
}

CellState cell_step(const RecurrentCell& cell, const Var& x, const CellState& state) {
  if (cell.kind == CellKind::gru) return {gru_step(cell, x, state.h), Var()};
  return lstm_step(cell, x, state.h, state.c);
}

// ------------------------------------------------------------ batches

bool SoftBatch::full_length() const {
  for (auto len : lengths) {
    if (len != steps.size()) return false;
  }
  return true;
}

Matrix SoftBatch::sample(std::size_t i) const {
  Matrix m(length(), width());
  for (std::size_t t = 0; t < length(); ++t) {
    const Matrix& step = steps[t].value();
    for (std::size_t v = 0; v < width(); ++v) m(t, v) = step(i, v);
  }
  return m;
}

SoftBatch one_hot_batch(std::span<const Sentence> windows, std::size_t vocab_size, TokenId pad) {
  SoftBatch batch;
  std::size_t longest = 0;
  for (const auto& w : windows) {
    if (w.empty()) throw Error("one_hot_batch: empty window");
    longest = std::max(longest, w.size());
    batch.lengths.push_back(w.size());
  }
  for (std::size_t t = 0; t < longest; ++t) {
    Matrix step(windows.size(), vocab_size);
    for (std::size_t i = 0; i < windows.size(); ++i) {
      const TokenId id = t < windows[i].size() ? windows[i][t] : pad;
      if (id < 0 || static_cast<std::size_t>(id) >= vocab_size) {
        throw Error("one_hot_batch: id " + std::to_string(id) + " out of range");
      }
      step(i, static_cast<std::size_t>(id)) = 1.0;
    }
    batch.steps.push_back(ad::constant(std::move(step)));
  }
  return batch;
}

SoftBatch batch_from_samples(std::span<const Matrix> samples, bool requires_grad) {
  SoftBatch batch;
  if (samples.empty()) return batch;
  const std::size_t T = samples.front().rows();
  const std::size_t V = samples.front().cols();
  for (const auto& s : samples) {
    if (s.rows() != T || s.cols() != V) throw Error("batch_from_samples: samples differ in shape");
  }
  for (std::size_t t = 0; t < T; ++t) {
    Matrix step(samples.size(), V);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      for (std::size_t v = 0; v < V; ++v) step(i, v) = samples[i](t, v);
    }
    batch.steps.push_back(Var(std::move(step), requires_grad));
  }
  batch.lengths.assign(samples.size(), T);
  return batch;
}

// ------------------------------------------------------------ networks

Generator Generator::create(const ModelShape& shape, Rng& rng) {
  check_shape(shape);
  Generator g;
  g.shape_ = shape;
  g.layers = make_layers(shape, rng);
  const double k = 1.0 / std::sqrt(static_cast<double>(shape.hidden_dim));
  g.noise_weight = param(uniform_matrix(shape.hidden_dim, shape.noise_dim, k, rng));
  g.noise_bias = param(Matrix(1, shape.hidden_dim));
  g.out_weight = param(uniform_matrix(shape.vocab_size, shape.hidden_dim, k, rng));
  g.out_bias = param(Matrix(1, shape.vocab_size));
  return g;
}

std::vector<NamedParam> Generator::parameters() const {
  std::vector<NamedParam> out;
  out.push_back({"gen.noise.W", noise_weight});
  out.push_back({"gen.noise.b", noise_bias});
  append_cell_params(layers, "gen", out);
  out.push_back({"gen.out.W", out_weight});
  out.push_back({"gen.out.b", out_bias});
  return out;
}

Critic Critic::create(const ModelShape& shape, bool sigmoid_output, Rng& rng) {
  check_shape(shape);
  Critic c;
  c.shape_ = shape;
  c.sigmoid_output_ = sigmoid_output;
  c.layers = make_layers(shape, rng);
  const double k = 1.0 / std::sqrt(static_cast<double>(shape.hidden_dim));
  c.out_weight = param(uniform_matrix(1, shape.hidden_dim, k, rng));
  c.out_bias = param(Matrix(1, 1));
  return c;
}

std::vector<NamedParam> Critic::parameters() const {
  std::vector<NamedParam> out;
  append_cell_params(layers, "critic", out);
  out.push_back({"critic.out.W", out_weight});
  out.push_back({"critic.out.b", out_bias});
  return out;
}

Matrix sample_noise(Rng& rng, std::size_t batch, std::size_t noise_dim) {
  Matrix m(batch, noise_dim);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = rng.normal();
  return m;
}

SoftBatch generate(const Generator& gen, const Matrix& noise, std::size_t length,
                   std::span<const Sentence> teacher, std::vector<Matrix>* inputs) {
  const auto& shape = gen.shape();
  if (length == 0) throw Error("generate: length must be at least 1");
  if (noise.cols() != shape.noise_dim) {
    throw Error("generate: noise has " + std::to_string(noise.cols()) + " columns, expected " +
                std::to_string(shape.noise_dim));
  }
  const std::size_t B = noise.rows();
  if (!teacher.empty() && teacher.size() != B) throw Error("generate: one teacher prefix per sample");
  for (const auto& p : teacher) {
    if (p.size() > length) throw Error("generate: teacher prefix longer than the sequence");
  }
  const std::size_t V = shape.vocab_size;

  std::vector<CellState> states(gen.layers.size());
  for (std::size_t l = 0; l < gen.layers.size(); ++l) {
    states[l].h = ad::constant(Matrix(B, shape.hidden_dim));
    if (shape.cell == CellKind::lstm) states[l].c = ad::constant(Matrix(B, shape.hidden_dim));
  }
  states[0].h = ad::tanh(affine(ad::constant(noise), gen.noise_weight, gen.noise_bias));

  SoftBatch out;
  out.lengths.assign(B, length);
  Var input = ad::constant(Matrix(B, V));
  for (std::size_t t = 0; t < length; ++t) {
    Var x = input;
    for (std::size_t l = 0; l < gen.layers.size(); ++l) {
      states[l] = cell_step(gen.layers[l], x, states[l]);
      x = states[l].h;
    }
    Var emitted = ad::softmax_rows(affine(x, gen.out_weight, gen.out_bias));

    bool forced_any = false;
    Matrix keep(B, V, 1.0);
    Matrix forced(B, V);
    for (std::size_t i = 0; i < teacher.size(); ++i) {
      if (t >= teacher[i].size()) continue;
      const TokenId id = teacher[i][t];
      if (id < 0 || static_cast<std::size_t>(id) >= V) throw Error("generate: teacher token out of range");
      forced_any = true;
      for (std::size_t v = 0; v < V; ++v) keep(i, v) = 0.0;
      forced(i, static_cast<std::size_t>(id)) = 1.0;
    }
    if (forced_any) emitted = ad::constant(std::move(keep)) * emitted + ad::constant(std::move(forced));

    if (inputs) inputs->push_back(input.value());
    out.steps.push_back(emitted);
    input = emitted;
  }
  return out;
}

Var critic_score(const Critic& critic, const SoftBatch& batch) {
  const auto& shape = critic.shape();
  if (batch.length() == 0 || batch.batch_size() == 0) throw Error("critic_score: empty batch");
  if (batch.width() != shape.vocab_size) {
    throw Error("critic_score: step width " + std::to_string(batch.width()) + " but critic expects " +
                std::to_string(shape.vocab_size));
  }
  const std::size_t B = batch.batch_size();
  const std::size_t H = shape.hidden_dim;
  for (const auto& step : batch.steps) {
    if (step.rows() != B) throw Error("critic_score: step rows differ from batch size");
  }
  const bool masked = !batch.full_length();

  std::vector<CellState> states(critic.layers.size());
  for (auto& s : states) {
    s.h = ad::constant(Matrix(B, H));
    if (shape.cell == CellKind::lstm) s.c = ad::constant(Matrix(B, H));
  }
  for (std::size_t t = 0; t < batch.length(); ++t) {
    Var keep_new;
    Var keep_old;
    if (masked) {
      Matrix m(B, H);
      for (std::size_t i = 0; i < B; ++i) {
        if (t < batch.lengths[i]) {
          for (std::size_t j = 0; j < H; ++j) m(i, j) = 1.0;
        }
      }
      Matrix inv(B, H);
      for (std::size_t k = 0; k < m.size(); ++k) inv[k] = 1.0 - m[k];
      keep_new = ad::constant(std::move(m));
      keep_old = ad::constant(std::move(inv));
    }
    Var x = batch.steps[t];
    for (std::size_t l = 0; l < critic.layers.size(); ++l) {
      CellState next = cell_step(critic.layers[l], x, states[l]);
      if (masked) {
        next.h = keep_new * next.h + keep_old * states[l].h;
        if (next.c.defined()) next.c = keep_new * next.c + keep_old * states[l].c;
      }
      states[l] = next;
      x = states[l].h;
    }
  }
  Var score = affine(states.back().h, critic.out_weight, critic.out_bias);
  return critic.sigmoid_output() ? ad::sigmoid(score) : score;
}

Sentence sample_hard(const Matrix& sequence, SampleMode mode, Rng& rng, TokenId eos_id) {
  Sentence out;
  for (std::size_t t = 0; t < sequence.rows(); ++t) {
    std::size_t pick = 0;
    if (mode == SampleMode::argmax) {
      for (std::size_t v = 1; v < sequence.cols(); ++v) {
        if (sequence(t, v) > sequence(t, pick)) pick = v;
      }
    } else {
      const double u = rng.uniform();
      double acc = 0.0;
      pick = sequence.cols() - 1;
      for (std::size_t v = 0; v < sequence.cols(); ++v) {
        acc += sequence(t, v);
        if (u < acc) {
          pick = v;
          break;
        }
      }
    }
    const auto id = static_cast<TokenId>(pick);
    if (id == eos_id) break;
    out.push_back(id);
  }
  return out;
}

}  // namespace lipgan
