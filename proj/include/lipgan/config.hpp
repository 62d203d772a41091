#pragma once

// Experiment configuration: plain-text `key = value` lines grouped under
// `[section]` headers. Keys are unique across sections, so command-line
// overrides (`--set key=value`) name the bare key. Unknown keys, keys under
// the wrong section, and out-of-range values are rejected.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "lipgan/corpus.hpp"
#include "lipgan/curriculum.hpp"
#include "lipgan/model.hpp"
#include "lipgan/objectives.hpp"

namespace lipgan {

struct ExperimentConfig {
  // [corpus]
  std::string corpus_path;
  TokenLevel level = TokenLevel::word;
  std::size_t max_vocab = 10000;
  std::size_t parts = 100;
  std::size_t max_line_bytes = 1 << 16;

  // [model]
  CellKind cell = CellKind::gru;
  std::size_t hidden = 32;
  std::size_t layers = 1;
  std::size_t noise_dim = 16;

  // [train]
  std::string mode = "wgan-lp";
  double lambda = 10.0;
  double clip = 0.01;
  std::size_t batch_size = 128;
  std::size_t n_critic = 5;
  double lr = 1e-4;
  double beta1 = 0.5;
  double beta2 = 0.9;
  double adam_eps = 1e-8;
  std::uint64_t iterations = 1000;
  double divergence_bound = 1e6;

  // [curriculum]
  CurriculumSchedule curriculum;

  // [eval]
  std::size_t eval_interval = 500;
  std::size_t eval_count = 640;
  std::size_t eval_len = 0;  // 0: curriculum max_len
  std::size_t sample_interval = 50;
  std::size_t sample_count = 64;

  // [run]
  std::uint64_t seed = 0;
  std::string out_dir = "run";
  std::size_t checkpoint_interval = 500;
  bool log_wall_time = false;

  static ExperimentConfig parse(std::istream& in);
  static ExperimentConfig parse(std::string_view text);
  static ExperimentConfig load(const std::filesystem::path& path);

  /// Assigns one key from its textual value; ConfigError on unknown key or bad value.
  void set(std::string_view key, std::string_view value);
  /// `key=value` form used by --set.
  void apply_override(std::string_view assignment);

  /// Canonical form: every key, fixed order; parse(write()) reproduces the config.
  void write(std::ostream& out) const;
  std::string to_string() const;

  void validate() const;

  TrainingMode training_mode() const;
  TrainConfig train_config() const;
  ModelShape model_shape(std::size_t vocab_size) const;
  std::size_t effective_eval_len() const { return eval_len == 0 ? curriculum.max_length : eval_len; }
};

}  // namespace lipgan
