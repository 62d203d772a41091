#pragma once

// Experiment orchestration: corpus preparation, the training loop with
// periodic evaluation, sampling and checkpointing, metrics.csv, plots, and
// multi-run comparison.
//
// Run directory layout:
//   config.ini            canonical config snapshot
//   vocab.txt             one token per line
//   metrics.csv           one row per iteration
//   evals/iter_NNNNNN.txt evaluation reports (iteration 0 included)
//   samples/iter_NNNNNN.txt
//   checkpoint/           latest training state
//   plots/training.svg
//   record.txt            run summary

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lipgan/config.hpp"
#include "lipgan/corpus.hpp"
#include "lipgan/eval.hpp"
#include "lipgan/objectives.hpp"

namespace lipgan {

inline constexpr std::string_view kMetricsHeader =
    "iteration,stage_len,critic_loss,gen_loss,penalty,grad_norm_mean,teacher_ratio,wall_s,nan";

struct MetricsRow {
  std::uint64_t iteration = 0;
  std::size_t stage_len = 0;
  double critic_loss = 0.0;
  double gen_loss = 0.0;
  double penalty = 0.0;
  std::optional<double> grad_norm_mean;
  double teacher_ratio = 0.0;
  double wall_s = 0.0;
  bool nan = false;

  static MetricsRow from(const TrainingMetrics& m, double wall_s);
  std::string to_csv() const;
  static MetricsRow parse_csv(std::string_view line);
};

std::vector<MetricsRow> read_metrics(const std::filesystem::path& csv);

struct PreparedData {
  TokenizedCorpus corpus;
  Split split;
};

/// Reads and ingests `corpus.path`, then partitions with a seed derived from
/// the run seed.
PreparedData prepare_data(const ExperimentConfig& config);

struct RunRecord {
  ExperimentConfig config;
  std::filesystem::path dir;
  std::vector<MetricsRow> metrics;
  std::vector<EvalReport> evals;
  std::vector<std::string> final_samples;  // decoded, from the last samples file
  std::filesystem::path checkpoint;
  bool diverged = false;
  std::string divergence_reason;
  double wall_seconds = 0.0;
  // Samples written at the periodic sampling points after iteration 0, and
  // how many of them are absent from the training corpus.
  std::uint64_t novel_samples = 0;
  std::uint64_t total_samples = 0;

  double cumulative_novelty() const {
    return total_samples == 0 ? 0.0 : static_cast<double>(novel_samples) / static_cast<double>(total_samples);
  }
  const EvalReport* final_eval() const { return evals.empty() ? nullptr : &evals.back(); }
};

/// True (with a reason) when the row breaks the divergence bound or holds a
/// non-finite value.
std::optional<std::string> divergence(const MetricsRow& row, double bound);

/// Full run into `config.out_dir`. Configuration problems surface as
/// ConfigError before anything is written.
RunRecord run(const ExperimentConfig& config);

/// Continues the run in `run_dir` from its last checkpoint. Overrides may
/// change iteration counts and intervals; metrics rows past the checkpoint
/// are dropped and regenerated.
RunRecord resume(const std::filesystem::path& run_dir, std::span<const std::string> overrides = {});

/// Evaluates the checkpointed generator of a run with its config.
EvalReport evaluate_run(const std::filesystem::path& run_dir, std::span<const std::string> overrides = {});

/// Reads a finished run directory back (metrics, record, last eval and samples).
RunRecord load_run(const std::filesystem::path& run_dir);

/// SVG of critic loss, generator loss, penalty and mean gradient norm.
std::string training_plot(std::span<const MetricsRow> rows, const std::string& title);

// ------------------------------------------------------------------ compare

/// Population standard deviation of the final 25% of the values (at least
/// one); non-finite values are skipped.
double stability_statistic(std::span<const double> critic_losses);

struct RunSummary {
  std::string label;
  std::string mode;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t first_iteration = 0;
  std::uint64_t last_iteration = 0;
  double stability = 0.0;
  bool diverged = false;
  double cumulative_novelty = 0.0;
  std::optional<EvalReport> final_eval;
  std::vector<std::string> samples;
};

struct Comparison {
  std::vector<RunSummary> runs;  // sorted by label
  std::string table;
  std::string plot_svg;
};

/// Needs two or more runs whose iteration ranges overlap.
Comparison compare(std::span<const RunRecord> runs);

/// Writes comparison.txt and comparison.svg into `out_dir`.
void write_comparison(const Comparison& comparison, const std::filesystem::path& out_dir);

// ------------------------------------------------------------------ corpus tools

/// Ingests `config.corpus_path` and writes vocab.txt, train.txt and
/// heldout.txt (decoded, one sentence per line) into `out_dir`.
PreparedData ingest_to_dir(const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// Samples `count` distinct sentences from a grammar (the built-in one when
/// `grammar_path` is empty) and writes them one per line.
void synthesize_corpus(const std::filesystem::path& out_file, std::size_t count, std::uint64_t seed,
                       const std::filesystem::path& grammar_path = {}, std::size_t max_depth = 30);

}  // namespace lipgan
