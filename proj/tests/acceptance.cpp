// Acceptance suite: one PASS/FAIL line per criterion, detail lines indented
// beneath. Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <cmath>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lipgan/corpus.hpp"
#include "lipgan/errors.hpp"
#include "lipgan/eval.hpp"
#include "lipgan/harness.hpp"
#include "lipgan/lipschitz.hpp"
#include "lipgan/model.hpp"
#include "lipgan/objectives.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

using namespace lipgan;
using ad::Matrix;
using ad::Var;
namespace fs = std::filesystem;

namespace {

// ------------------------------------------------------------------ tolerances

// Batch means are sums in a different order than the hand formula.
constexpr double kBatchMeanTol = 1e-14;
constexpr double kCellGradTol = 1e-4;
constexpr double kCriticGradTol = 1e-4;
constexpr double kNestedGradTol = 1e-3;
// Gradient norms below this are compared absolutely; round-off in a
// vanishing gradient is not a relative error.
constexpr double kGradFloor = 1e-6;
constexpr int kGradSeeds = 20;
constexpr int kOracleTrials = 100;
constexpr double kMinUnigramGain = 0.3;

// Desk-scale training settings shared by criteria 4-6.
constexpr std::size_t kCorpusSize = 10000;
constexpr std::size_t kMaxVocab = 30;
constexpr std::uint64_t kIterations = 2000;
constexpr std::size_t kMaxLen = 5;
constexpr std::size_t kHidden = 16;
constexpr std::size_t kBatch = 32;
constexpr double kLearningRate = 1e-3;
const std::vector<std::uint64_t> kSeeds{1, 2, 3};
const std::vector<double> kLambdas{1, 10, 100};

struct Outcome {
  bool pass = false;
  std::vector<std::string> details;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng, double scale = 1.0) {
  Matrix m(r, c);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = scale * (2.0 * rng.uniform() - 1.0);
  return m;
}

// Worst relative error between autodiff and central differences over all
// entries of `wrt`.
double worst_gradient_error(std::vector<Var> wrt, const std::function<Var()>& loss) {
  const auto analytic = ad::grad(loss(), wrt);
  double worst = 0.0;
  for (std::size_t i = 0; i < wrt.size(); ++i) {
    const auto fd = oracle::central_diff(wrt[i].mutable_value(), [&] { return loss().item(); });
    worst = std::max(worst, oracle::relative_error(analytic[i].value(), fd, kGradFloor));
  }
  return worst;
}

std::vector<Var> vars_of(const std::vector<NamedParam>& params) {
  std::vector<Var> v;
  for (const auto& p : params) v.push_back(p.var);
  return v;
}

void randomize(const std::vector<NamedParam>& params, Rng& rng) {
  for (auto p : params) p.var.mutable_value() = random_matrix(p.var.rows(), p.var.cols(), rng, 0.8);
}

// ------------------------------------------------------------------ 1

Outcome penalty_algebra() {
  Outcome o{true, {}};
  const std::vector<double> norms{0, 0.25, 0.5, 1, 1.5, 2};
  // (n - 1)^2 and max(0, n - 1)^2 by hand.
  const std::vector<double> two{1, 0.5625, 0.25, 0, 0.25, 1};
  const std::vector<double> one{0, 0, 0, 0, 0.25, 1};
  int checked = 0;
  for (double lambda : {1.0, 10.0}) {
    for (std::size_t i = 0; i < norms.size(); ++i) {
      const std::vector<double> n{norms[i]};
      const double t = penalty_two_sided(n, lambda);
      const double s = penalty_one_sided(n, lambda);
      const Var nv = ad::constant(Matrix(1, 1, norms[i]));
      const double tv = penalty_two_sided(nv, lambda).item();
      const double sv = penalty_one_sided(nv, lambda).item();
      const bool ok = t == lambda * two[i] && s == lambda * one[i] && tv == t && sv == s && s <= t;
      if (!ok) {
        o.pass = false;
        o.details.push_back(fmt("norm %g lambda %g: two-sided %.17g one-sided %.17g", norms[i], lambda, t, s));
      }
      ++checked;
    }
    const double t_all = penalty_two_sided(norms, lambda);
    const double s_all = penalty_one_sided(norms, lambda);
    const auto near = [](double a, double b) { return std::abs(a - b) <= kBatchMeanTol * std::abs(b); };
    if (!near(t_all, lambda * 3.0625 / 6.0) || !near(s_all, lambda * 1.25 / 6.0)) {
      o.pass = false;
      o.details.push_back(fmt("batch mean at lambda %g: %.17g / %.17g", lambda, t_all, s_all));
    }
  }
  o.details.push_back(fmt("%d grid points; norm 0.5, lambda 1 -> two-sided %g, one-sided %g", checked,
                          penalty_two_sided(std::vector<double>{0.5}, 1.0),
                          penalty_one_sided(std::vector<double>{0.5}, 1.0)));
  return o;
}

// ------------------------------------------------------------------ 2

Outcome gradient_correctness() {
  double worst_cell = 0.0, worst_critic = 0.0, worst_nested = 0.0;
  for (int seed = 0; seed < kGradSeeds; ++seed) {
    Rng rng(9000 + static_cast<std::uint64_t>(seed));
    const std::size_t vocab = rng.uniform_int(2, 4);
    const std::size_t hidden = rng.uniform_int(1, 4);
    const std::size_t steps = rng.uniform_int(1, 3);
    const std::size_t batch = rng.uniform_int(1, 3);

    for (CellKind kind : {CellKind::gru, CellKind::lstm}) {
      auto cell = RecurrentCell::create(kind, vocab, hidden, rng);
      std::vector<NamedParam> params;
      cell.append_parameters("cell", params);
      randomize(params, rng);
      Var x(random_matrix(batch, vocab, rng), true);
      Var h(random_matrix(batch, hidden, rng), true);
      Var c(random_matrix(batch, hidden, rng), true);
      const Var ph = ad::constant(random_matrix(batch, hidden, rng));
      const Var pc = ad::constant(random_matrix(batch, hidden, rng));
      auto wrt = vars_of(params);
      wrt.insert(wrt.end(), {x, h});
      if (kind == CellKind::lstm) wrt.push_back(c);
      worst_cell = std::max(worst_cell, worst_gradient_error(wrt, [&] {
                              if (kind == CellKind::gru) return ad::sum(gru_step(cell, x, h) * ph);
                              const auto s = lstm_step(cell, x, h, c);
                              return ad::sum(s.h * ph) + ad::sum(s.c * pc);
                            }));

      const ModelShape shape{kind, vocab, hidden, 1, 2};
      const auto critic = Critic::create(shape, false, rng);
      randomize(critic.parameters(), rng);
      std::vector<Matrix> real_rows, fake_rows;
      for (std::size_t b = 0; b < batch; ++b) {
        Sentence s;
        for (std::size_t t = 0; t < steps; ++t) s.push_back(static_cast<TokenId>(rng.uniform_int(0, vocab - 1)));
        real_rows.push_back(one_hot(s, vocab));
        fake_rows.push_back(random_matrix(steps, vocab, rng, 2.0));
      }
      const auto real = batch_from_samples(real_rows);
      const auto fake = batch_from_samples(fake_rows);
      const Var probe = ad::constant(random_matrix(batch, 1, rng));
      worst_critic = std::max(worst_critic, worst_gradient_error(vars_of(critic.parameters()), [&] {
                                return ad::sum(critic_score(critic, fake) * probe);
                              }));

      std::vector<double> eps;
      for (std::size_t b = 0; b < batch; ++b) eps.push_back(rng.uniform());
      const TrainingMode mode = OneSidedLP{1.0 + 20.0 * rng.uniform()};
      worst_nested = std::max(worst_nested, worst_gradient_error(vars_of(critic.parameters()), [&] {
                                return critic_objective(critic, real, fake, mode, eps).loss;
                              }));
    }
  }
  Outcome o;
  o.pass = worst_cell <= kCellGradTol && worst_critic <= kCriticGradTol && worst_nested <= kNestedGradTol;
  o.details.push_back(fmt("%d seeds x {gru, lstm}; worst relative error: cell %.3g (<= %g), critic_score %.3g (<= %g), "
                          "one-sided critic loss %.3g (<= %g)",
                          kGradSeeds, worst_cell, kCellGradTol, worst_critic, kCriticGradTol, worst_nested,
                          kNestedGradTol));
  return o;
}

// ------------------------------------------------------------------ 3

Sentence random_sentence(Rng& rng, std::size_t vocab, std::size_t max_len, bool specials) {
  Sentence s;
  const auto len = rng.uniform_int(0, max_len);
  for (std::size_t i = 0; i < len; ++i) {
    auto t = static_cast<TokenId>(rng.uniform_int(0, vocab - 1));
    if (!specials && (t == Vocabulary::kPadId || t == Vocabulary::kEosId)) t = Vocabulary::kUnkId;
    s.push_back(t);
  }
  if (!specials || rng.uniform() < 0.5) s.push_back(Vocabulary::kEosId);
  return s;
}

TokenizedCorpus corpus_of(std::vector<Sentence> sentences, std::size_t vocab) {
  TokenizedCorpus c;
  for (std::size_t v = 3; v < vocab; ++v) c.vocab.add("t" + std::to_string(v));
  c.sentences = std::move(sentences);
  return c;
}

Outcome metric_oracle() {
  Rng rng(31337);
  int mismatches = 0;
  for (int trial = 0; trial < kOracleTrials; ++trial) {
    const std::size_t vocab = rng.uniform_int(4, 10);
    std::vector<Sentence> held, train, samples;
    for (std::size_t i = 0, n = rng.uniform_int(1, 20); i < n; ++i) held.push_back(random_sentence(rng, vocab, 6, false));
    for (std::size_t i = 0, n = rng.uniform_int(1, 20); i < n; ++i) train.push_back(random_sentence(rng, vocab, 4, false));
    for (std::size_t i = 0, n = rng.uniform_int(1, 20); i < n; ++i) {
      samples.push_back(rng.uniform() < 0.3 ? train[rng.uniform_int(0, train.size() - 1)]
                                            : random_sentence(rng, vocab, 6, true));
    }
    const std::vector<oracle::Tokens> h(held.begin(), held.end()), t(train.begin(), train.end()),
        s(samples.begin(), samples.end());
    const auto index = NGramIndex::build(corpus_of(held, vocab));
    for (std::size_t n = 1; n <= kMaxNgram; ++n) {
      if (percent_in_test_n(samples, index, n) != oracle::percent_in_test(s, h, n)) ++mismatches;
    }
    if (novelty_score(samples, corpus_of(train, vocab)) != oracle::novelty(s, t)) ++mismatches;
  }
  Outcome o;
  o.pass = mismatches == 0;
  o.details.push_back(fmt("%d random corpora, %%-IN-TEST-1..4 and novelty; %d mismatches against brute force",
                          kOracleTrials, mismatches));
  return o;
}

// ------------------------------------------------------------------ training runs

class Runs {
 public:
  explicit Runs(fs::path work) : work_(std::move(work)) {}

  const fs::path& corpus() {
    if (corpus_.empty()) {
      corpus_ = work_ / "corpus.txt";
      synthesize_corpus(corpus_, kCorpusSize, 1);
    }
    return corpus_;
  }

  ExperimentConfig base(const std::string& mode, double lambda, std::uint64_t seed) {
    ExperimentConfig c;
    c.corpus_path = corpus().string();
    c.max_vocab = kMaxVocab;
    c.parts = 100;
    c.hidden = kHidden;
    c.batch_size = kBatch;
    c.lr = kLearningRate;
    c.mode = mode;
    c.lambda = lambda;
    c.iterations = kIterations;
    c.curriculum.max_length = kMaxLen;
    c.curriculum.iterations_per_stage = kIterations / kMaxLen;
    c.eval_interval = 500;
    c.sample_interval = 50;
    c.sample_count = 64;
    c.checkpoint_interval = 500;
    c.seed = seed;
    return c;
  }

  // Cached by run name within one invocation.
  const RunRecord& get(const std::string& mode, double lambda, std::uint64_t seed) {
    const std::string name = fmt("%s_l%g_s%llu", mode.c_str(), lambda, static_cast<unsigned long long>(seed));
    if (auto it = done_.find(name); it != done_.end()) return it->second;
    auto cfg = base(mode, lambda, seed);
    cfg.out_dir = (work_ / "runs" / name).string();
    const auto t0 = std::chrono::steady_clock::now();
    auto rec = run(cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cerr << "  ran " << name << " in " << fmt("%.1f", secs) << " s" << (rec.diverged ? " (diverged)" : "") << '\n';
    return done_.emplace(name, std::move(rec)).first->second;
  }

  const fs::path& work() const { return work_; }

 private:
  fs::path work_;
  fs::path corpus_;
  std::map<std::string, RunRecord> done_;
};

// ------------------------------------------------------------------ 4

Outcome learning_signal(Runs& runs) {
  Outcome o;
  std::vector<double> gains;
  bool any_diverged = false;
  std::size_t vocab = 0;
  for (auto seed : kSeeds) {
    const auto& rec = runs.get("wgan-lp", 10, seed);
    const double before = rec.evals.front().percent_in_test[0];
    const double after = rec.final_eval()->percent_in_test[0];
    gains.push_back(after - before);
    any_diverged = any_diverged || rec.diverged;
    o.details.push_back(fmt("seed %llu: %%-IN-TEST-1 %.4f -> %.4f (gain %+.4f), %%-IN-TEST-2 %.4f%s",
                            static_cast<unsigned long long>(seed), before, after, after - before,
                            rec.final_eval()->percent_in_test[1], rec.diverged ? ", DIVERGED" : ""));
    std::ifstream vin(rec.dir / "vocab.txt");
    vocab = Vocabulary::load(vin).size();
  }
  const double m = median(gains);
  o.pass = m >= kMinUnigramGain && !any_diverged && vocab <= kMaxVocab;
  o.details.insert(o.details.begin(),
                   fmt("%zu-sentence grammar corpus, vocabulary %zu; median gain %.4f (>= %g), %s", kCorpusSize, vocab,
                       m, kMinUnigramGain, any_diverged ? "divergence flagged" : "no divergence"));
  return o;
}

// ------------------------------------------------------------------ 5

std::string summary_line(const RunSummary& s) {
  return fmt("%-22s stability %10.5f  diverged %-3s  %%-IN-TEST-1 %s", s.label.c_str(), s.stability,
             s.diverged ? "yes" : "no", s.final_eval ? fmt("%.4f", s.final_eval->percent_in_test[0]).c_str() : "-");
}

Outcome lambda_robustness(Runs& runs) {
  Outcome o{true, {}};
  std::vector<RunRecord> all;
  for (double lambda : kLambdas) {
    std::vector<double> flags;
    for (auto seed : kSeeds) {
      const auto& rec = runs.get("wgan-lp", lambda, seed);
      flags.push_back(rec.diverged ? 1.0 : 0.0);
      all.push_back(rec);
    }
    const bool ok = median(flags) == 0.0;
    o.pass = o.pass && ok;
    o.details.push_back(fmt("wgan-lp lambda %g: %d of %zu seeds diverged%s", lambda,
                            static_cast<int>(std::count(flags.begin(), flags.end(), 1.0)), flags.size(),
                            ok ? "" : "  <- median run diverged"));
  }
  for (double lambda : kLambdas) {
    for (auto seed : kSeeds) all.push_back(runs.get("wgan-gp", lambda, seed));
  }
  const auto cmp = compare(all);
  const fs::path out = runs.work() / "lambda_sweep";
  write_comparison(cmp, out);
  o.details.push_back("reported (not asserted), see " + (out / "comparison.txt").string() + ":");
  for (const auto& s : cmp.runs) o.details.push_back("  " + summary_line(s));
  return o;
}

// ------------------------------------------------------------------ 6

Outcome regime_comparison(Runs& runs) {
  Outcome o;
  std::vector<RunRecord> all;
  const std::vector<std::pair<std::string, double>> regimes{{"gan", 10}, {"wgan-clip", 10}, {"wgan-gp", 10}, {"wgan-lp", 10}};
  for (const auto& [mode, lambda] : regimes) {
    double novelty = 0.0;
    int diverged = 0;
    for (auto seed : kSeeds) {
      const auto& rec = runs.get(mode, lambda, seed);
      novelty += rec.cumulative_novelty() / static_cast<double>(kSeeds.size());
      diverged += rec.diverged;
      all.push_back(rec);
    }
    o.details.push_back(fmt("%-10s novelty score %.4f (mean of %zu seeds), %d diverged", mode.c_str(), novelty,
                            kSeeds.size(), diverged));
  }
  const auto cmp = compare(all);
  const fs::path out = runs.work() / "regimes";
  write_comparison(cmp, out);
  for (const auto& s : cmp.runs) {
    if (s.seed != kSeeds.front() || s.samples.empty()) continue;
    o.details.push_back(fmt("sample [%s]: %s", s.mode.c_str(), s.samples.front().c_str()));
  }
  o.pass = fs::exists(out / "comparison.txt") && fs::exists(out / "comparison.svg") && cmp.runs.size() == all.size();
  o.details.insert(o.details.begin(), "artifact: " + (out / "comparison.txt").string());
  return o;
}

// ------------------------------------------------------------------ 7

Outcome determinism(Runs& runs) {
  Outcome o{true, {}};
  constexpr std::uint64_t kShort = 300;
  auto cfg = runs.base("wgan-lp", 10, 7);
  cfg.iterations = kShort;
  cfg.checkpoint_interval = 50;
  const fs::path root = runs.work() / "determinism";

  auto a = cfg;
  a.out_dir = (root / "a").string();
  auto b = cfg;
  b.out_dir = (root / "b").string();
  run(a);
  run(b);
  const bool same = slurp(root / "a" / "metrics.csv") == slurp(root / "b" / "metrics.csv") &&
                    slurp(root / "a" / "samples" / "iter_000300.txt") == slurp(root / "b" / "samples" / "iter_000300.txt");
  o.pass = o.pass && same;
  o.details.push_back(fmt("rerun of %llu iterations: metrics.csv and samples %s", static_cast<unsigned long long>(kShort),
                          same ? "byte-identical" : "DIFFER"));

  for (std::uint64_t k : {1ull, 50ull, 137ull, 299ull}) {
    auto part = cfg;
    part.iterations = k;
    part.out_dir = (root / fmt("resume_%llu", k)).string();
    run(part);
    const std::vector<std::string> more{"iterations=" + std::to_string(kShort)};
    resume(part.out_dir, more);
    const bool match = slurp(fs::path(part.out_dir) / "metrics.csv") == slurp(root / "a" / "metrics.csv");
    o.pass = o.pass && match;
    o.details.push_back(fmt("resume from iteration %llu: metrics rows %s", k, match ? "identical" : "DIFFER"));
  }
  return o;
}

// ------------------------------------------------------------------ 8

Outcome corpus_pipeline(Runs& runs) {
  Outcome o{true, {}};
  auto note = [&](bool ok, const std::string& what) {
    o.pass = o.pass && ok;
    o.details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  };

  std::vector<std::string> lines;
  {
    std::ifstream in(runs.corpus());
    for (std::string l; std::getline(in, l);) lines.push_back(l);
  }
  auto with_dupes = lines;
  for (std::size_t i = 0; i < lines.size(); i += 7) with_dupes.push_back(lines[i]);
  const IngestOptions opts{TokenLevel::word, kMaxVocab, 1 << 16};
  const auto once = ingest(with_dupes, opts);
  std::vector<std::string> rendered;
  for (const auto& s : once.sentences) rendered.push_back(decode(s, once.vocab, once.level));
  const auto twice = ingest(rendered, opts);
  std::vector<std::string> again;
  for (const auto& s : twice.sentences) again.push_back(decode(s, twice.vocab, twice.level));
  std::multiset<std::string> m1(rendered.begin(), rendered.end()), m2(again.begin(), again.end());
  note(once.sentences.size() == lines.size() && m1 == m2,
       fmt("dedup: %zu lines with %zu duplicates -> %zu sentences; re-ingest gives the same multiset", with_dupes.size(),
           with_dupes.size() - lines.size(), once.sentences.size()));

  bool partitions_ok = true;
  std::size_t held_size = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto split = partition(once, 100, seed);
    held_size = split.heldout.sentences.size();
    std::multiset<Sentence> all(once.sentences.begin(), once.sentences.end());
    std::multiset<Sentence> joined(split.train.sentences.begin(), split.train.sentences.end());
    joined.insert(split.heldout.sentences.begin(), split.heldout.sentences.end());
    const std::set<Sentence> train_set(split.train.sentences.begin(), split.train.sentences.end());
    bool disjoint = true;
    for (const auto& s : split.heldout.sentences) disjoint = disjoint && !train_set.count(s);
    const double expected = static_cast<double>(once.sentences.size()) / 100.0;
    partitions_ok = partitions_ok && disjoint && joined == all &&
                    std::abs(static_cast<double>(held_size) - expected) <= 1.0;
  }
  note(partitions_ok, fmt("partition parts=100, 5 seeds: disjoint, complete, held-out %zu of %zu", held_size,
                          once.sentences.size()));

  const auto two = ingest(std::vector<std::string>{"a b", "a b", "c"}, {});
  note(two.sentences.size() == 2, "[\"a b\", \"a b\", \"c\"] -> 2 sentences");
  const auto capped = ingest(std::vector<std::string>{"a a a b"}, {TokenLevel::word, 4, 1 << 16});
  note(capped.sentences.front() == Sentence{capped.vocab.id("a"), capped.vocab.id("a"), capped.vocab.id("a"),
                                            Vocabulary::kUnkId, Vocabulary::kEosId} &&
           capped.vocab.size() == 4,
       "\"a a a b\" with max_vocab 4 -> b maps to [unk]");
  const auto chars = ingest(std::vector<std::string>{"ab"}, {TokenLevel::character, 100, 1 << 16});
  note(chars.sentences.front() == Sentence{chars.vocab.id("a"), chars.vocab.id("b"), Vocabulary::kEosId},
       "character level \"ab\" -> [a, b, eos]");
  bool coverage = true;
  for (std::size_t i = 0; i < 500; ++i) {
    const auto& s = once.sentences[i];
    const auto original = tokenize(rendered[i], TokenLevel::word);
    for (std::size_t t = 0; t + 1 < s.size(); ++t) {
      coverage = coverage && (s[t] == Vocabulary::kUnkId || once.vocab.token(s[t]) == original[t]);
    }
  }
  note(coverage, "encode/decode differs only at [unk] positions");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance suite"};
  std::string work = "acceptance_runs";
  app.add_option("--work-dir", work, "Scratch directory for training runs (cleared first)");
  CLI11_PARSE(app, argc, argv);

  const fs::path work_dir = fs::absolute(work);
  fs::remove_all(work_dir);
  fs::create_directories(work_dir);
  Runs runs(work_dir);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 penalty algebra", penalty_algebra},
      {"2 gradient correctness", gradient_correctness},
      {"3 metric oracle equivalence", metric_oracle},
      {"4 desk-scale learning signal", [&] { return learning_signal(runs); }},
      {"5 lambda robustness", [&] { return lambda_robustness(runs); }},
      {"6 regime comparison (reported)", [&] { return regime_comparison(runs); }},
      {"7 determinism and resume", [&] { return determinism(runs); }},
      {"8 corpus pipeline", [&] { return corpus_pipeline(runs); }},
  };

  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.details.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << name << fmt(" (%.1f s)", secs) << '\n';
    for (const auto& d : o.details) std::cout << "       " << d << '\n';
    std::cout.flush();
    failed += !o.pass;
  }
  std::cout << (failed == 0 ? "all criteria passed\n" : fmt("%d criteria failed\n", failed));
  return failed == 0 ? 0 : 1;
}
