#include "lipgan/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>

#include "lipgan/checkpoint.hpp"
#include "lipgan/errors.hpp"
#include "lipgan/svg.hpp"

namespace lipgan {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kPartitionTag = 3;
constexpr std::uint64_t kEvalTag = 4;
constexpr std::uint64_t kSampleTag = 5;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string iter_file(std::uint64_t iteration) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "iter_%06llu.txt", static_cast<unsigned long long>(iteration));
  return buf;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::trunc) {
  std::ofstream out(path, std::ios::binary | mode);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

double parse_double(std::string_view text, std::string_view what) {
  const std::string s(text);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw IoError("bad " + std::string(what) + " value '" + s + "'");
  return v;
}

std::uint64_t parse_uint(std::string_view text, std::string_view what) {
  const std::string s(text);
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw IoError("bad " + std::string(what) + " value '" + s + "'");
  return v;
}

std::map<std::string, std::string> read_key_values(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

EvalReport read_eval_report(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  while (std::getline(in, line) && line != "[metrics]") {
  }
  const auto kv = read_key_values(in);
  auto get = [&](const std::string& key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw IoError(path.string() + ": missing '" + key + "'");
    return it->second;
  };
  EvalReport r;
  r.iteration = parse_uint(get("iteration"), "iteration");
  r.sample_count = parse_uint(get("sample_count"), "sample_count");
  for (std::size_t n = 1; n <= kMaxNgram; ++n) {
    const std::string key = "percent_in_test_" + std::to_string(n);
    r.percent_in_test[n - 1] = parse_double(get(key), key);
  }
  r.novelty = parse_double(get("novelty"), "novelty");
  return r;
}

std::vector<std::pair<std::uint64_t, fs::path>> iteration_files(const fs::path& dir) {
  std::vector<std::pair<std::uint64_t, fs::path>> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() == 15 && name.starts_with("iter_") && name.ends_with(".txt")) {
      out.emplace_back(parse_uint(name.substr(5, 6), "file iteration"), entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> read_lines(const fs::path& path, bool skip_comments) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (skip_comments && line.starts_with('#')) continue;
    lines.push_back(line);
  }
  return lines;
}

// Everything a training session needs besides the mutable state.
struct Session {
  ExperimentConfig config;
  fs::path dir;
  PreparedData data;
  TrainConfig train;
  NGramIndex index;
  SentenceSet train_set;
  RealSampler sampler;

  explicit Session(ExperimentConfig cfg)
      : config(std::move(cfg)),
        dir(config.out_dir),
        data(prepare_data(config)),
        train(config.train_config()),
        index(NGramIndex::build(data.split.heldout)),
        train_set(data.split.train),
        sampler(data.split.train, config.curriculum.max_length) {}

  TrainState initial_state() const {
    return TrainState::create(config.model_shape(data.corpus.vocab.size()), train, config.seed);
  }

  EvalReport evaluate_at(const Generator& gen, std::uint64_t iteration) const {
    Rng rng(derive_seed(derive_seed(config.seed, kEvalTag), iteration));
    EvalReport r = evaluate(gen, index, train_set, {config.eval_count, config.effective_eval_len(), 128}, rng);
    r.iteration = iteration;
    auto out = open_out(dir / "evals" / iter_file(iteration));
    r.write(out);
    return r;
  }

  struct SampleDump {
    std::vector<std::string> decoded;
    std::uint64_t novel = 0;
  };

  SampleDump write_samples(const Generator& gen, std::uint64_t iteration) const {
    ad::NoGrad off;
    Rng rng(derive_seed(derive_seed(config.seed, kSampleTag), iteration));
    const auto noise = sample_noise(rng, config.sample_count, gen.shape().noise_dim);
    const auto soft = generate(gen, noise, config.effective_eval_len());
    std::vector<Sentence> sentences;
    for (std::size_t i = 0; i < config.sample_count; ++i) {
      sentences.push_back(sample_hard(soft.sample(i), SampleMode::multinomial, rng, Vocabulary::kEosId));
    }
    SampleDump dump;
    for (const auto& s : sentences) {
      if (!train_set.contains(s)) ++dump.novel;
    }
    auto out = open_out(dir / "samples" / iter_file(iteration));
    out << "# iteration " << iteration << " novelty " << fmt(novelty_score(sentences, train_set)) << '\n';
    for (const auto& s : sentences) {
      dump.decoded.push_back(decode(s, data.corpus.vocab, data.corpus.level));
      out << dump.decoded.back() << '\n';
    }
    return dump;
  }
};

void write_record(const RunRecord& rec) {
  std::ostringstream o;
  o << "iterations=" << (rec.metrics.empty() ? 0 : rec.metrics.back().iteration) << '\n';
  o << "mode=" << rec.config.mode << '\n';
  o << "lambda=" << fmt(rec.config.lambda) << '\n';
  o << "seed=" << rec.config.seed << '\n';
  o << "diverged=" << (rec.diverged ? "true" : "false") << '\n';
  o << "divergence_reason=" << rec.divergence_reason << '\n';
  o << "novel_samples=" << rec.novel_samples << '\n';
  o << "total_samples=" << rec.total_samples << '\n';
  o << "cumulative_novelty=" << fmt(rec.cumulative_novelty()) << '\n';
  o << "checkpoint=" << (rec.checkpoint.empty() ? "" : rec.checkpoint.filename().string()) << '\n';
  o << "wall_seconds=" << (rec.config.log_wall_time ? fmt(rec.wall_seconds) : "0") << '\n';
  write_text(rec.dir / "record.txt", o.str());
}

void write_plot(const RunRecord& rec) {
  fs::create_directories(rec.dir / "plots");
  write_text(rec.dir / "plots" / "training.svg",
             training_plot(rec.metrics, rec.config.mode + " lambda=" + fmt(rec.config.lambda) +
                                            " seed=" + std::to_string(rec.config.seed)));
}

CheckpointExtras tallies(const RunRecord& rec) {
  return {{"novel_samples", std::to_string(rec.novel_samples)}, {"total_samples", std::to_string(rec.total_samples)}};
}

// Trains from `state` to config.iterations, appending to `metrics_out`.
void train_loop(const Session& s, TrainState& state, RunRecord& rec, std::ofstream& metrics_out) {
  const auto& cfg = s.config;
  const auto started = std::chrono::steady_clock::now();
  while (state.iteration < cfg.iterations) {
    const TrainingMetrics m = train_step(state, s.train, s.sampler);
    const double wall =
        cfg.log_wall_time ? std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count() : 0.0;
    const MetricsRow row = MetricsRow::from(m, wall);
    metrics_out << row.to_csv() << '\n';
    rec.metrics.push_back(row);
    const std::uint64_t it = state.iteration;

    if (const auto reason = divergence(row, cfg.divergence_bound)) {
      rec.diverged = true;
      rec.divergence_reason = *reason;
      break;
    }
    const bool last = it == cfg.iterations;
    if (it % cfg.sample_interval == 0 || last) {
      auto dump = s.write_samples(state.generator, it);
      rec.novel_samples += dump.novel;
      rec.total_samples += dump.decoded.size();
      rec.final_samples = std::move(dump.decoded);
    }
    if (it % cfg.eval_interval == 0 || last) rec.evals.push_back(s.evaluate_at(state.generator, it));
    if (it % cfg.checkpoint_interval == 0 || last) {
      metrics_out.flush();
      save_checkpoint(s.dir, state, tallies(rec));
      rec.checkpoint = s.dir / "checkpoint";
    }
  }
  metrics_out.flush();
  if (!metrics_out) throw IoError("write failed: " + (s.dir / "metrics.csv").string());
}

}  // namespace

// ------------------------------------------------------------------ metrics rows

MetricsRow MetricsRow::from(const TrainingMetrics& m, double wall_s) {
  return MetricsRow{m.iteration,     m.stage_len, m.critic_loss, m.gen_loss, m.penalty, m.grad_norm_mean,
                    m.teacher_ratio, wall_s,      m.nan};
}

std::string MetricsRow::to_csv() const {
  std::string s = std::to_string(iteration) + ',' + std::to_string(stage_len) + ',' + fmt(critic_loss) + ',' +
                  fmt(gen_loss) + ',' + fmt(penalty) + ',';
  if (grad_norm_mean) s += fmt(*grad_norm_mean);
  s += ',' + fmt(teacher_ratio) + ',' + fmt(wall_s) + ',' + (nan ? "1" : "0");
  return s;
}

MetricsRow MetricsRow::parse_csv(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (cells.size() != 9) throw IoError("metrics row has " + std::to_string(cells.size()) + " fields, expected 9");
  MetricsRow r;
  r.iteration = parse_uint(cells[0], "iteration");
  r.stage_len = parse_uint(cells[1], "stage_len");
  r.critic_loss = parse_double(cells[2], "critic_loss");
  r.gen_loss = parse_double(cells[3], "gen_loss");
  r.penalty = parse_double(cells[4], "penalty");
  if (!cells[5].empty()) r.grad_norm_mean = parse_double(cells[5], "grad_norm_mean");
  r.teacher_ratio = parse_double(cells[6], "teacher_ratio");
  r.wall_s = parse_double(cells[7], "wall_s");
  if (cells[8] != "0" && cells[8] != "1") throw IoError("bad nan value '" + std::string(cells[8]) + "'");
  r.nan = cells[8] == "1";
  return r;
}

std::vector<MetricsRow> read_metrics(const fs::path& csv) {
  std::ifstream in(csv);
  if (!in) throw IoError("cannot read " + csv.string());
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader) throw IoError(csv.string() + ": unexpected header");
  std::vector<MetricsRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(MetricsRow::parse_csv(line));
    if (rows.size() > 1 && rows.back().iteration <= rows[rows.size() - 2].iteration) {
      throw IoError(csv.string() + ": iterations not strictly increasing");
    }
  }
  return rows;
}

std::optional<std::string> divergence(const MetricsRow& row, double bound) {
  if (row.nan) return "non-finite value at iteration " + std::to_string(row.iteration);
  for (double v : {row.critic_loss, row.gen_loss, row.penalty}) {
    if (!std::isfinite(v)) return "non-finite value at iteration " + std::to_string(row.iteration);
  }
  if (std::abs(row.critic_loss) > bound) {
    return "critic loss " + fmt(row.critic_loss) + " beyond bound at iteration " + std::to_string(row.iteration);
  }
  return std::nullopt;
}

// ------------------------------------------------------------------ runs

PreparedData prepare_data(const ExperimentConfig& config) {
  if (config.corpus_path.empty()) throw ConfigError("corpus path is not set (key 'path')");
  std::ifstream in(config.corpus_path);
  if (!in) throw IoError("cannot open corpus '" + config.corpus_path + "'");
  PreparedData d;
  d.corpus = ingest(in, IngestOptions{config.level, config.max_vocab, config.max_line_bytes});
  d.split = partition(d.corpus, config.parts, derive_seed(config.seed, kPartitionTag));
  return d;
}

RunRecord run(const ExperimentConfig& config) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();
  Session s(config);
  TrainState state = s.initial_state();

  fs::create_directories(s.dir / "evals");
  fs::create_directories(s.dir / "samples");
  write_text(s.dir / "config.ini", config.to_string());
  {
    auto out = open_out(s.dir / "vocab.txt");
    s.data.corpus.vocab.save(out);
  }

  RunRecord rec;
  rec.config = config;
  rec.dir = s.dir;
  rec.evals.push_back(s.evaluate_at(state.generator, 0));
  rec.final_samples = s.write_samples(state.generator, 0).decoded;
  save_checkpoint(s.dir, state, tallies(rec));
  rec.checkpoint = s.dir / "checkpoint";

  auto metrics_out = open_out(s.dir / "metrics.csv");
  metrics_out << kMetricsHeader << '\n';
  train_loop(s, state, rec, metrics_out);

  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  write_plot(rec);
  write_record(rec);
  return rec;
}

RunRecord resume(const fs::path& run_dir, std::span<const std::string> overrides) {
  const auto started = std::chrono::steady_clock::now();
  ExperimentConfig config = ExperimentConfig::load(run_dir / "config.ini");
  for (const auto& o : overrides) config.apply_override(o);
  config.out_dir = run_dir.string();
  config.validate();

  Session s(config);
  TrainState state = s.initial_state();
  const auto extras = load_checkpoint(run_dir, state);
  const std::uint64_t k = state.iteration;

  RunRecord rec;
  for (auto [key, field] : {std::pair{"novel_samples", &rec.novel_samples}, std::pair{"total_samples", &rec.total_samples}}) {
    const auto it = extras.find(key);
    if (it == extras.end()) throw IoError("checkpoint lacks '" + std::string(key) + "'");
    *field = parse_uint(it->second, key);
  }
  rec.config = config;
  rec.dir = s.dir;
  rec.checkpoint = s.dir / "checkpoint";
  for (const auto& row : read_metrics(run_dir / "metrics.csv")) {
    if (row.iteration <= k) rec.metrics.push_back(row);
  }
  if (rec.metrics.size() != k) {
    throw IoError("metrics.csv holds " + std::to_string(rec.metrics.size()) + " rows up to iteration " +
                  std::to_string(k) + ", expected " + std::to_string(k));
  }
  for (const char* sub : {"evals", "samples"}) {
    for (const auto& [it, path] : iteration_files(run_dir / sub)) {
      if (it > k) fs::remove(path);
    }
  }
  for (const auto& [it, path] : iteration_files(run_dir / "evals")) rec.evals.push_back(read_eval_report(path));
  if (const auto samples = iteration_files(run_dir / "samples"); !samples.empty()) {
    rec.final_samples = read_lines(samples.back().second, true);
  }
  write_text(run_dir / "config.ini", config.to_string());

  auto metrics_out = open_out(run_dir / "metrics.csv");
  metrics_out << kMetricsHeader << '\n';
  for (const auto& row : rec.metrics) metrics_out << row.to_csv() << '\n';
  train_loop(s, state, rec, metrics_out);

  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  write_plot(rec);
  write_record(rec);
  return rec;
}

EvalReport evaluate_run(const fs::path& run_dir, std::span<const std::string> overrides) {
  ExperimentConfig config = ExperimentConfig::load(run_dir / "config.ini");
  for (const auto& o : overrides) config.apply_override(o);
  config.out_dir = run_dir.string();
  config.validate();
  Session s(config);
  TrainState state = s.initial_state();
  load_checkpoint(run_dir, state);
  fs::create_directories(run_dir / "evals");
  return s.evaluate_at(state.generator, state.iteration);
}

RunRecord load_run(const fs::path& run_dir) {
  RunRecord rec;
  rec.dir = run_dir;
  rec.config = ExperimentConfig::load(run_dir / "config.ini");
  rec.metrics = read_metrics(run_dir / "metrics.csv");
  for (const auto& [it, path] : iteration_files(run_dir / "evals")) rec.evals.push_back(read_eval_report(path));
  if (const auto samples = iteration_files(run_dir / "samples"); !samples.empty()) {
    rec.final_samples = read_lines(samples.back().second, true);
  }
  std::ifstream in(run_dir / "record.txt");
  if (!in) throw IoError("cannot read " + (run_dir / "record.txt").string());
  const auto kv = read_key_values(in);
  if (const auto it = kv.find("diverged"); it != kv.end()) rec.diverged = it->second == "true";
  if (const auto it = kv.find("divergence_reason"); it != kv.end()) rec.divergence_reason = it->second;
  if (const auto it = kv.find("checkpoint"); it != kv.end() && !it->second.empty()) {
    rec.checkpoint = run_dir / it->second;
  }
  if (const auto it = kv.find("novel_samples"); it != kv.end()) rec.novel_samples = parse_uint(it->second, "novel_samples");
  if (const auto it = kv.find("total_samples"); it != kv.end()) rec.total_samples = parse_uint(it->second, "total_samples");
  if (const auto it = kv.find("wall_seconds"); it != kv.end()) rec.wall_seconds = parse_double(it->second, "wall_seconds");
  return rec;
}

std::string training_plot(std::span<const MetricsRow> rows, const std::string& title) {
  svg::Series critic{"critic loss", {}, {}};
  svg::Series gen{"generator loss", {}, {}};
  svg::Series penalty{"penalty", {}, {}};
  svg::Series norm{"mean grad norm", {}, {}, true};
  for (const auto& r : rows) {
    const auto x = static_cast<double>(r.iteration);
    critic.x.push_back(x);
    critic.y.push_back(r.critic_loss);
    gen.x.push_back(x);
    gen.y.push_back(r.gen_loss);
    if (r.grad_norm_mean) {
      penalty.x.push_back(x);
      penalty.y.push_back(r.penalty);
      norm.x.push_back(x);
      norm.y.push_back(*r.grad_norm_mean);
    }
  }
  return svg::render({title, "iteration", "value", {critic, gen, penalty, norm}});
}

// ------------------------------------------------------------------ compare

double stability_statistic(std::span<const double> critic_losses) {
  if (critic_losses.empty()) return 0.0;
  const std::size_t tail = std::max<std::size_t>(1, (critic_losses.size() + 3) / 4);
  std::vector<double> v;
  for (double x : critic_losses.subspan(critic_losses.size() - tail)) {
    if (std::isfinite(x)) v.push_back(x);
  }
  if (v.empty()) return 0.0;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

Comparison compare(std::span<const RunRecord> runs) {
  if (runs.size() < 2) throw ConfigError("compare needs at least two runs");
  std::vector<std::pair<RunSummary, const RunRecord*>> rows;
  for (const auto& r : runs) {
    if (r.metrics.empty()) throw ConfigError("run " + r.dir.string() + " has no metrics rows");
    RunSummary s;
    s.label = r.dir.filename().string();
    if (s.label.empty()) s.label = r.dir.parent_path().filename().string();
    s.mode = r.config.mode;
    s.lambda = r.config.lambda;
    s.seed = r.config.seed;
    s.first_iteration = r.metrics.front().iteration;
    s.last_iteration = r.metrics.back().iteration;
    std::vector<double> losses;
    for (const auto& row : r.metrics) losses.push_back(row.critic_loss);
    s.stability = stability_statistic(losses);
    s.diverged = r.diverged;
    s.cumulative_novelty = r.cumulative_novelty();
    if (const auto* e = r.final_eval()) s.final_eval = *e;
    s.samples = r.final_samples;
    rows.emplace_back(std::move(s), &r);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::tie(a.first.label, a.first.mode, a.first.lambda, a.first.seed) <
           std::tie(b.first.label, b.first.mode, b.first.lambda, b.first.seed);
  });
  Comparison c;
  for (const auto& [summary, record] : rows) c.runs.push_back(summary);
  std::uint64_t lo = 0;
  std::uint64_t hi = UINT64_MAX;
  for (const auto& s : c.runs) {
    lo = std::max(lo, s.first_iteration);
    hi = std::min(hi, s.last_iteration);
  }
  if (lo > hi) throw ConfigError("compare: runs have disjoint iteration ranges");

  std::ostringstream t;
  char line[256];
  std::snprintf(line, sizeof line, "%-24s %-10s %8s %6s %10s %12s %8s %8s %8s %8s %8s\n", "run", "mode", "lambda",
                "seed", "iters", "stability", "diverged", "%in-1", "%in-2", "%in-3", "%in-4");
  t << line;
  for (const auto& s : c.runs) {
    std::snprintf(line, sizeof line, "%-24s %-10s %8s %6llu %10llu %12.6f %8s", s.label.c_str(), s.mode.c_str(),
                  fmt(s.lambda).c_str(), static_cast<unsigned long long>(s.seed),
                  static_cast<unsigned long long>(s.last_iteration), s.stability, s.diverged ? "yes" : "no");
    t << line;
    for (std::size_t n = 0; n < kMaxNgram; ++n) {
      if (s.final_eval) {
        std::snprintf(line, sizeof line, " %8.4f", s.final_eval->percent_in_test[n]);
      } else {
        std::snprintf(line, sizeof line, " %8s", "-");
      }
      t << line;
    }
    t << '\n';
  }
  t << "\nnovelty (share of generated sentences absent from the training corpus)\n";
  std::snprintf(line, sizeof line, "  %-24s %12s %12s\n", "run", "during-train", "final-eval");
  t << line;
  for (const auto& s : c.runs) {
    std::snprintf(line, sizeof line, "  %-24s %12.4f %12s\n", s.label.c_str(), s.cumulative_novelty,
                  s.final_eval ? fmt(s.final_eval->novelty).c_str() : "-");
    t << line;
  }
  t << "\nsamples\n";
  for (const auto& s : c.runs) {
    t << "  [" << s.label << "]\n";
    for (std::size_t i = 0; i < std::min<std::size_t>(s.samples.size(), 5); ++i) t << "    " << s.samples[i] << '\n';
  }
  c.table = t.str();

  std::vector<svg::Series> series;
  for (const auto& [s, rec_ptr] : rows) {
    const RunRecord& rec = *rec_ptr;
    svg::Series line_series{s.diverged ? s.label + " (diverged)" : s.label, {}, {}, s.diverged};
    std::vector<double> losses;
    for (const auto& row : rec.metrics) {
      line_series.x.push_back(static_cast<double>(row.iteration));
      losses.push_back(row.critic_loss);
    }
    line_series.y = s.diverged ? losses : svg::moving_average(losses, std::max<std::size_t>(1, losses.size() / 50));
    series.push_back(std::move(line_series));
  }
  c.plot_svg = svg::render({"critic loss", "iteration", "critic loss", std::move(series)});
  return c;
}

void write_comparison(const Comparison& comparison, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  write_text(out_dir / "comparison.txt", comparison.table);
  write_text(out_dir / "comparison.svg", comparison.plot_svg);
}

// ------------------------------------------------------------------ corpus tools

PreparedData ingest_to_dir(const ExperimentConfig& config, const fs::path& out_dir) {
  PreparedData d = prepare_data(config);
  fs::create_directories(out_dir);
  {
    auto out = open_out(out_dir / "vocab.txt");
    d.corpus.vocab.save(out);
  }
  const auto dump = [&](const TokenizedCorpus& c, const fs::path& path) {
    auto out = open_out(path);
    for (const auto& s : c.sentences) out << decode(s, c.vocab, c.level) << '\n';
  };
  dump(d.split.train, out_dir / "train.txt");
  dump(d.split.heldout, out_dir / "heldout.txt");
  return d;
}

void synthesize_corpus(const fs::path& out_file, std::size_t count, std::uint64_t seed, const fs::path& grammar_path,
                       std::size_t max_depth) {
  Pcfg grammar;
  if (grammar_path.empty()) {
    grammar = Pcfg::parse(builtin_grammar_text());
  } else {
    std::ifstream in(grammar_path);
    if (!in) throw IoError("cannot open grammar '" + grammar_path.string() + "'");
    grammar = Pcfg::parse(in);
  }
  const auto lines = sample_pcfg_unique(grammar, count, seed, max_depth);
  if (out_file.has_parent_path()) fs::create_directories(out_file.parent_path());
  std::ostringstream o;
  for (const auto& l : lines) o << l << '\n';
  write_text(out_file, o.str());
}

}  // namespace lipgan
