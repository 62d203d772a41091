// lipgan: corpus preparation, training, evaluation and run comparison.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lipgan/config.hpp"
#include "lipgan/errors.hpp"
#include "lipgan/harness.hpp"

namespace {

enum ExitCode : int { kOk = 0, kUsage = 1, kDiverged = 2, kIo = 3 };

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "Experiment config file");
  cmd->add_option("--seed", f.seed, "Run seed");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--set", f.sets, "Override a config key (key=value)")->allow_extra_args(false);
}

lipgan::ExperimentConfig build_config(const CommonFlags& f) {
  lipgan::ExperimentConfig cfg;
  if (!f.config_path.empty()) cfg = lipgan::ExperimentConfig::load(f.config_path);
  for (const auto& s : f.sets) cfg.apply_override(s);
  if (f.seed) cfg.seed = *f.seed;
  if (!f.out.empty()) cfg.out_dir = f.out;
  return cfg;
}

int report_run(const lipgan::RunRecord& rec) {
  std::cout << "run directory: " << rec.dir.string() << '\n';
  std::cout << "iterations: " << (rec.metrics.empty() ? 0 : rec.metrics.back().iteration) << '\n';
  if (const auto* e = rec.final_eval()) e->write(std::cout);
  if (rec.diverged) {
    std::cerr << "diverged: " << rec.divergence_reason << '\n';
    return kDiverged;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversarial text generation with Lipschitz-regularized critics"};
  app.require_subcommand(1);

  CommonFlags ingest_flags, synth_flags, train_flags, eval_flags, compare_flags, resume_flags;

  auto* ingest = app.add_subcommand("ingest", "Tokenize, deduplicate and split a corpus");
  add_common(ingest, ingest_flags);

  auto* synth = app.add_subcommand("synth", "Sample a synthetic corpus from a PCFG");
  add_common(synth, synth_flags);
  std::size_t synth_count = 10000;
  std::size_t synth_depth = 30;
  std::string grammar;
  synth->add_option("--count", synth_count, "Number of distinct sentences");
  synth->add_option("--grammar", grammar, "Grammar file (default: built-in toy English)");
  synth->add_option("--max-depth", synth_depth, "Derivation depth limit");

  auto* train = app.add_subcommand("train", "Train a generator/critic pair");
  add_common(train, train_flags);

  auto* eval = app.add_subcommand("eval", "Evaluate the checkpointed generator of a run");
  add_common(eval, eval_flags);
  std::string eval_run;
  eval->add_option("run", eval_run, "Run directory")->required();

  auto* compare = app.add_subcommand("compare", "Compare finished runs");
  add_common(compare, compare_flags);
  std::vector<std::string> compare_runs;
  compare->add_option("runs", compare_runs, "Run directories")->required();

  auto* resume = app.add_subcommand("resume", "Continue a run from its last checkpoint");
  add_common(resume, resume_flags);
  std::string resume_run;
  resume->add_option("run", resume_run, "Run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*ingest) {
      const auto cfg = build_config(ingest_flags);
      cfg.validate();
      const auto d = lipgan::ingest_to_dir(cfg, cfg.out_dir);
      std::cout << "sentences: " << d.corpus.sentences.size() << " (train " << d.split.train.sentences.size()
                << ", held-out " << d.split.heldout.sentences.size() << ")\nvocabulary: " << d.corpus.vocab.size()
                << '\n';
      return kOk;
    }
    if (*synth) {
      const auto cfg = build_config(synth_flags);
      const std::filesystem::path out = std::filesystem::path(cfg.out_dir) / "corpus.txt";
      lipgan::synthesize_corpus(out, synth_count, cfg.seed, grammar, synth_depth);
      std::cout << "wrote " << synth_count << " sentences to " << out.string() << '\n';
      return kOk;
    }
    if (*train) return report_run(lipgan::run(build_config(train_flags)));
    if (*eval) {
      auto overrides = eval_flags.sets;
      if (eval_flags.seed) overrides.push_back("seed=" + std::to_string(*eval_flags.seed));
      lipgan::evaluate_run(eval_run, overrides).write(std::cout);
      return kOk;
    }
    if (*resume) {
      auto overrides = resume_flags.sets;
      if (resume_flags.config_path.size()) {
        throw lipgan::ConfigError("resume reads config.ini from the run directory; use --set to change keys");
      }
      return report_run(lipgan::resume(resume_run, overrides));
    }
    if (*compare) {
      std::vector<lipgan::RunRecord> runs;
      for (const auto& r : compare_runs) runs.push_back(lipgan::load_run(r));
      const auto c = lipgan::compare(runs);
      const std::string out = compare_flags.out.empty() ? "comparison" : compare_flags.out;
      lipgan::write_comparison(c, out);
      std::cout << c.table;
      return kOk;
    }
  } catch (const lipgan::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const lipgan::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kOk;
}
