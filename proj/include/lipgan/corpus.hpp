#pragma once

// Corpus ingestion: line-per-sentence text in, deduplicated token-id
// sentences and a frequency-ranked vocabulary out. Also the seeded
// held-out split and the PCFG sampler used to make synthetic corpora.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lipgan/autodiff.hpp"

namespace lipgan {

using TokenId = std::int32_t;
using Sentence = std::vector<TokenId>;

enum class TokenLevel { word, character };

TokenLevel parse_token_level(std::string_view text);
std::string_view to_string(TokenLevel level);

/// Bidirectional token <-> id map. Ids 0, 1, 2 are always [unk], [pad], [eos].
class Vocabulary {
 public:
  static constexpr std::string_view kUnk = "[unk]";
  static constexpr std::string_view kPad = "[pad]";
  static constexpr std::string_view kEos = "[eos]";
  static constexpr TokenId kUnkId = 0;
  static constexpr TokenId kPadId = 1;
  static constexpr TokenId kEosId = 2;

  Vocabulary();

  /// Appends a token; throws on duplicates.
  TokenId add(std::string token);

  std::optional<TokenId> find(std::string_view token) const;
  /// Id of `token`, or unk_id() when absent.
  TokenId id(std::string_view token) const;
  const std::string& token(TokenId id) const;

  TokenId unk_id() const { return kUnkId; }
  TokenId pad_id() const { return kPadId; }
  TokenId eos_id() const { return kEosId; }
  std::size_t size() const { return tokens_.size(); }

  /// One token per line; the line number is the id.
  void save(std::ostream& out) const;
  static Vocabulary load(std::istream& in);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.tokens_ == b.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> ids_;
};

struct TokenizedCorpus {
  std::vector<Sentence> sentences;  // each ends with eos_id
  Vocabulary vocab;
  TokenLevel level = TokenLevel::word;
};

struct IngestOptions {
  TokenLevel level = TokenLevel::word;
  std::size_t max_vocab = 10000;  // including the three reserved tokens
  std::size_t max_line_bytes = 1 << 16;
};

/// Splits a line into tokens: ASCII whitespace for words, UTF-8 code points
/// for characters.
std::vector<std::string> tokenize(std::string_view line, TokenLevel level);

TokenizedCorpus ingest(std::istream& lines, const IngestOptions& options);
TokenizedCorpus ingest(std::span<const std::string> lines, const IngestOptions& options);

/// Renders a sentence back to text, stopping at eos and skipping pad.
std::string decode(std::span<const TokenId> sentence, const Vocabulary& vocab, TokenLevel level);
/// Encodes text with an existing vocabulary (unknown tokens -> unk), appending eos.
Sentence encode(std::string_view line, const Vocabulary& vocab, TokenLevel level);

struct Split {
  TokenizedCorpus train;
  TokenizedCorpus heldout;
};

/// Seeded shuffle, round-robin assignment to `parts` partitions, partition 0
/// held out.
Split partition(const TokenizedCorpus& corpus, std::size_t parts, std::uint64_t seed);

/// T x V indicator matrix.
ad::Matrix one_hot(std::span<const TokenId> sentence, std::size_t vocab_size);

// ------------------------------------------------------------------ PCFG

struct Pcfg {
  struct Rule {
    double weight = 1.0;
    std::vector<std::string> expansion;
  };
  // Symbols with rules are nonterminals; every other symbol is a terminal.
  std::map<std::string, std::vector<Rule>> rules;
  std::string start;

  void validate() const;
  bool is_nonterminal(const std::string& symbol) const { return rules.contains(symbol); }

  /// Text format, one rule per line: `NONTERM weight -> sym sym ...`.
  /// '#' starts a comment. The first rule's left side is the start symbol.
  static Pcfg parse(std::istream& in);
  static Pcfg parse(std::string_view text);
};

/// Long-tailed toy English grammar (27 terminals) used for desk-scale runs.
std::string_view builtin_grammar_text();

/// Draws `n` sentences top-down with rule choice proportional to weight.
/// Derivations deeper than `max_depth` are rejected and redrawn.
std::vector<std::string> sample_pcfg(const Pcfg& grammar, std::size_t n, std::uint64_t seed,
                                     std::size_t max_depth);

/// Like sample_pcfg but keeps drawing until `n` distinct sentences exist.
std::vector<std::string> sample_pcfg_unique(const Pcfg& grammar, std::size_t n, std::uint64_t seed,
                                            std::size_t max_depth);

}  // namespace lipgan
