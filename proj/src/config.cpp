#include "lipgan/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <type_traits>
#include <vector>

#include "lipgan/errors.hpp"

namespace lipgan {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_value(std::string_view key, std::string_view text);

template <>
std::uint64_t parse_value<std::uint64_t>(std::string_view key, std::string_view text) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("config key '" + std::string(key) + "': expected a non-negative integer, got '" +
                      std::string(text) + "'");
  }
  return v;
}

template <>
double parse_value<double>(std::string_view key, std::string_view text) {
  const std::string s(text);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
    throw ConfigError("config key '" + std::string(key) + "': expected a finite number, got '" + s + "'");
  }
  return v;
}

template <>
bool parse_value<bool>(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("config key '" + std::string(key) + "': expected true or false, got '" +
                    std::string(text) + "'");
}

template <>
std::string parse_value<std::string>(std::string_view, std::string_view text) {
  return std::string(text);
}

template <>
TokenLevel parse_value<TokenLevel>(std::string_view, std::string_view text) {
  return parse_token_level(text);
}

template <>
CellKind parse_value<CellKind>(std::string_view, std::string_view text) {
  return parse_cell_kind(text);
}

std::string format_value(std::uint64_t v) { return std::to_string(v); }
std::string format_value(bool v) { return v ? "true" : "false"; }
std::string format_value(const std::string& v) { return v; }
std::string format_value(TokenLevel v) { return std::string(to_string(v)); }
std::string format_value(CellKind v) { return std::string(to_string(v)); }
std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Field {
  std::string_view section;
  std::string_view key;
  std::function<void(ExperimentConfig&, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename Access>
Field field(std::string_view section, std::string_view key, Access access) {
  using T = std::remove_cvref_t<decltype(access(std::declval<ExperimentConfig&>()))>;
  return Field{
      section,
      key,
      [access, key](ExperimentConfig& c, std::string_view v) { access(c) = parse_value<T>(key, v); },
      [access](const ExperimentConfig& c) { return format_value(access(const_cast<ExperimentConfig&>(c))); },
  };
}

#define LIPGAN_FIELD(section, key, expr) field(section, key, [](ExperimentConfig& c) -> auto& { return expr; })

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      LIPGAN_FIELD("corpus", "path", c.corpus_path),
      LIPGAN_FIELD("corpus", "level", c.level),
      LIPGAN_FIELD("corpus", "max_vocab", c.max_vocab),
      LIPGAN_FIELD("corpus", "parts", c.parts),
      LIPGAN_FIELD("corpus", "max_line_bytes", c.max_line_bytes),
      LIPGAN_FIELD("model", "cell", c.cell),
      LIPGAN_FIELD("model", "hidden", c.hidden),
      LIPGAN_FIELD("model", "layers", c.layers),
      LIPGAN_FIELD("model", "noise_dim", c.noise_dim),
      LIPGAN_FIELD("train", "mode", c.mode),
      LIPGAN_FIELD("train", "lambda", c.lambda),
      LIPGAN_FIELD("train", "clip", c.clip),
      LIPGAN_FIELD("train", "batch_size", c.batch_size),
      LIPGAN_FIELD("train", "n_critic", c.n_critic),
      LIPGAN_FIELD("train", "lr", c.lr),
      LIPGAN_FIELD("train", "beta1", c.beta1),
      LIPGAN_FIELD("train", "beta2", c.beta2),
      LIPGAN_FIELD("train", "adam_eps", c.adam_eps),
      LIPGAN_FIELD("train", "iterations", c.iterations),
      LIPGAN_FIELD("train", "divergence_bound", c.divergence_bound),
      LIPGAN_FIELD("curriculum", "max_len", c.curriculum.max_length),
      LIPGAN_FIELD("curriculum", "start_len", c.curriculum.start_length),
      LIPGAN_FIELD("curriculum", "iters_per_stage", c.curriculum.iterations_per_stage),
      LIPGAN_FIELD("curriculum", "variable_len", c.curriculum.variable_length),
      LIPGAN_FIELD("curriculum", "teacher_start", c.curriculum.teacher_ratio_start),
      LIPGAN_FIELD("curriculum", "teacher_decay", c.curriculum.teacher_decay),
      LIPGAN_FIELD("eval", "eval_interval", c.eval_interval),
      LIPGAN_FIELD("eval", "eval_count", c.eval_count),
      LIPGAN_FIELD("eval", "eval_len", c.eval_len),
      LIPGAN_FIELD("eval", "sample_interval", c.sample_interval),
      LIPGAN_FIELD("eval", "sample_count", c.sample_count),
      LIPGAN_FIELD("run", "seed", c.seed),
      LIPGAN_FIELD("run", "out", c.out_dir),
      LIPGAN_FIELD("run", "checkpoint_interval", c.checkpoint_interval),
      LIPGAN_FIELD("run", "log_wall_time", c.log_wall_time),
  };
  return table;
}

#undef LIPGAN_FIELD

const Field& find_field(std::string_view key) {
  for (const auto& f : fields()) {
    if (f.key == key) return f;
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

}  // namespace

void ExperimentConfig::set(std::string_view key, std::string_view value) {
  find_field(trim(key)).set(*this, trim(value));
}

void ExperimentConfig::apply_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("override '" + std::string(assignment) + "' is not of the form key=value");
  }
  set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
  ExperimentConfig cfg;
  std::string section;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("config line " + std::to_string(line_no) + ": bad section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    const Field& f = find_field(key);
    if (!section.empty() && section != f.section) {
      throw ConfigError("config line " + std::to_string(line_no) + ": key '" + std::string(key) +
                        "' belongs in [" + std::string(f.section) + "], not [" + section + "]");
    }
    f.set(cfg, trim(line.substr(eq + 1)));
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse(in);
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  return parse(in);
}

void ExperimentConfig::write(std::ostream& out) const {
  std::string_view section;
  for (const auto& f : fields()) {
    if (f.section != section) {
      if (!section.empty()) out << '\n';
      section = f.section;
      out << '[' << section << "]\n";
    }
    out << f.key << " = " << f.get(*this) << '\n';
  }
}

std::string ExperimentConfig::to_string() const {
  std::ostringstream os;
  write(os);
  return os.str();
}

void ExperimentConfig::validate() const {
  if (max_vocab < 4) throw ConfigError("max_vocab must be at least 4");
  if (parts < 2) throw ConfigError("parts must be at least 2");
  if (max_line_bytes < 1) throw ConfigError("max_line_bytes must be positive");
  if (hidden < 1 || hidden > 4096) throw ConfigError("hidden must lie in [1, 4096]");
  if (layers < 1 || layers > 8) throw ConfigError("layers must lie in [1, 8]");
  if (noise_dim < 1 || noise_dim > 4096) throw ConfigError("noise_dim must lie in [1, 4096]");
  if (!(divergence_bound > 0.0)) throw ConfigError("divergence_bound must be positive");
  if (eval_interval < 1 || sample_interval < 1 || checkpoint_interval < 1) {
    throw ConfigError("eval_interval, sample_interval and checkpoint_interval must be positive");
  }
  if (eval_count < 1) throw ConfigError("eval_count must be positive");
  train_config().validate();
}

TrainingMode ExperimentConfig::training_mode() const { return parse_training_mode(mode, lambda, clip); }

TrainConfig ExperimentConfig::train_config() const {
  TrainConfig t;
  t.mode = training_mode();
  t.n_critic = n_critic;
  t.batch_size = batch_size;
  t.critic_adam = AdamConfig{lr, beta1, beta2, adam_eps};
  t.generator_adam = t.critic_adam;
  t.schedule = curriculum;
  return t;
}

ModelShape ExperimentConfig::model_shape(std::size_t vocab_size) const {
  return ModelShape{cell, vocab_size, hidden, layers, noise_dim};
}

}  // namespace lipgan
