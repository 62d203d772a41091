#include <cmath>
#include <optional>
#include <istream>
#include <sstream>
#include <unordered_set>

#include "lipgan/corpus.hpp"
#include "lipgan/errors.hpp"
#include "lipgan/rng.hpp"

namespace lipgan {

namespace {

// Ten frequent terminals carry nearly all the mass; seventeen tail terminals
// are rare enough that a 1% held-out split usually misses them.
constexpr std::string_view kBuiltinGrammar = R"(# toy English with a long-tailed lexicon
S    1     -> NP VP .
NP   0.6   -> Det N
NP   0.2   -> Det Adj N
NP   0.198 -> NP with NP
NP   0.002 -> Name
VP   0.7   -> V NP
VP   0.3   -> VP and VP
Det  0.5   -> the
Det  0.5   -> a
N    0.5   -> cat
N    0.5   -> dog
N    0.0005 -> ox
N    0.0005 -> yak
N    0.0005 -> emu
N    0.0005 -> gnu
N    0.0005 -> eel
N    0.0005 -> owl
Adj  0.99  -> big
Adj  0.0025 -> odd
Adj  0.0025 -> shy
Adj  0.0025 -> tiny
Adj  0.0025 -> old
V    0.5   -> sees
V    0.5   -> likes
V    0.001 -> hugs
V    0.001 -> bites
V    0.001 -> fears
V    0.001 -> finds
V    0.001 -> helps
Name 0.5   -> zed
Name 0.5   -> kim
)";

constexpr std::size_t kMaxTerminals = 10000;
constexpr std::size_t kRetriesPerSentence = 1000;

class Sampler {
 public:
  Sampler(const Pcfg& g, Rng& rng, std::size_t max_depth) : g_(g), rng_(rng), max_depth_(max_depth) {}

  // Returns nullopt when the derivation is too deep or too long.
  std::optional<std::string> draw() {
    out_.clear();
    if (!expand(g_.start, 1)) return std::nullopt;
    std::string s;
    for (std::size_t i = 0; i < out_.size(); ++i) {
      if (i) s += ' ';
      s += *out_[i];
    }
    return s;
  }

 private:
  bool expand(const std::string& symbol, std::size_t depth) {
    auto it = g_.rules.find(symbol);
    if (it == g_.rules.end()) {
      if (out_.size() >= kMaxTerminals) return false;
      out_.push_back(&symbol);
      return true;
    }
    if (depth > max_depth_) return false;
    const auto& rules = it->second;
    double total = 0.0;
    for (const auto& r : rules) total += r.weight;
    const double x = rng_.uniform() * total;
    double acc = 0.0;
    const Pcfg::Rule* chosen = &rules.back();
    for (const auto& r : rules) {
      acc += r.weight;
      if (x < acc) {
        chosen = &r;
        break;
      }
    }
    for (const auto& sym : chosen->expansion) {
      if (!expand(sym, depth + 1)) return false;
    }
    return true;
  }

  const Pcfg& g_;
  Rng& rng_;
  std::size_t max_depth_;
  std::vector<const std::string*> out_;
};

std::string draw_one(Sampler& sampler) {
  for (std::size_t attempt = 0; attempt < kRetriesPerSentence; ++attempt) {
    if (auto s = sampler.draw()) return *s;
  }
  throw Error("grammar does not terminate within max_depth after " +
              std::to_string(kRetriesPerSentence) + " attempts");
}

}  // namespace

std::string_view builtin_grammar_text() { return kBuiltinGrammar; }

void Pcfg::validate() const {
  if (start.empty() || !rules.contains(start)) throw ConfigError("pcfg: start symbol has no rules");
  for (const auto& [lhs, alternatives] : rules) {
    if (alternatives.empty()) throw ConfigError("pcfg: nonterminal '" + lhs + "' has no rules");
    double total = 0.0;
    for (const auto& r : alternatives) {
      if (!(r.weight > 0.0) || !std::isfinite(r.weight)) {
        throw ConfigError("pcfg: rule for '" + lhs + "' has non-positive weight");
      }
      total += r.weight;
    }
    if (!(total > 0.0)) throw ConfigError("pcfg: weights for '" + lhs + "' do not sum to a positive value");
  }
}

Pcfg Pcfg::parse(std::istream& in) {
  Pcfg g;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string lhs;
    if (!(fields >> lhs)) continue;
    std::string weight_text;
    std::string arrow;
    if (!(fields >> weight_text >> arrow) || arrow != "->") {
      throw ConfigError("pcfg line " + std::to_string(line_no) + ": expected 'NONTERM weight -> ...'");
    }
    Rule rule;
    try {
      std::size_t used = 0;
      rule.weight = std::stod(weight_text, &used);
      if (used != weight_text.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ConfigError("pcfg line " + std::to_string(line_no) + ": bad weight '" + weight_text + "'");
    }
    std::string sym;
    while (fields >> sym) rule.expansion.push_back(sym);
    if (g.start.empty()) g.start = lhs;
    g.rules[lhs].push_back(std::move(rule));
  }
  g.validate();
  return g;
}

Pcfg Pcfg::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse(in);
}

std::vector<std::string> sample_pcfg(const Pcfg& grammar, std::size_t n, std::uint64_t seed,
                                     std::size_t max_depth) {
  grammar.validate();
  Rng rng(seed);
  Sampler sampler(grammar, rng, max_depth);
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(draw_one(sampler));
  return out;
}

std::vector<std::string> sample_pcfg_unique(const Pcfg& grammar, std::size_t n, std::uint64_t seed,
                                            std::size_t max_depth) {
  grammar.validate();
  Rng rng(seed);
  Sampler sampler(grammar, rng, max_depth);
  std::unordered_set<std::string> seen;
  std::vector<std::string> out;
  const std::size_t budget = 1000 * n + 1000;
  for (std::size_t draws = 0; out.size() < n; ++draws) {
    if (draws >= budget) {
      throw Error("grammar yields fewer than " + std::to_string(n) + " distinct sentences");
    }
    auto s = draw_one(sampler);
    if (seen.insert(s).second) out.push_back(std::move(s));
  }
  return out;
}

}  // namespace lipgan
