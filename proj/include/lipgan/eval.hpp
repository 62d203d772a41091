#pragma once

// %-IN-TEST-n (share of generated n-gram occurrences found in a held-out set)
// and the novelty score (share of generated sentences absent from the
// training corpus).

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "lipgan/corpus.hpp"
#include "lipgan/model.hpp"
#include "lipgan/rng.hpp"

namespace lipgan {

inline constexpr std::size_t kMaxNgram = 4;
inline constexpr std::size_t kDefaultEvalCount = 640;

/// Fixed-width n-gram key; unused slots hold -1.
using NGram = std::array<TokenId, kMaxNgram>;

struct NGramHash {
  std::size_t operator()(const NGram& g) const noexcept;
};

/// Membership sets of held-out n-grams for n = 1..max_n. Pad and eos split
/// a sentence; no n-gram spans them.
class NGramIndex {
 public:
  static NGramIndex build(const TokenizedCorpus& heldout, std::size_t max_n = kMaxNgram);

  bool contains(std::span<const TokenId> ngram) const;
  std::size_t max_n() const { return sets_.size(); }
  std::size_t count(std::size_t n) const { return sets_.at(n - 1).size(); }

 private:
  std::vector<std::unordered_set<NGram, NGramHash>> sets_;
};

/// Calls f(start, n) for every n-gram of `sentence` that avoids pad and eos.
template <typename F>
void for_each_ngram(std::span<const TokenId> sentence, std::size_t n, F&& f) {
  std::size_t run = 0;  // length of the current pad/eos-free run ending at i
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    const TokenId id = sentence[i];
    if (id == Vocabulary::kPadId || id == Vocabulary::kEosId) {
      run = 0;
      continue;
    }
    ++run;
    if (run >= n) f(i + 1 - n, n);
  }
}

struct NGramCounts {
  std::uint64_t hits = 0;
  std::uint64_t total = 0;
};

namespace serial {
NGramCounts count_ngrams(std::span<const Sentence> samples, const NGramIndex& index, std::size_t n);
}
namespace parallel {
NGramCounts count_ngrams(std::span<const Sentence> samples, const NGramIndex& index, std::size_t n);
}

/// Hits over total n-gram occurrences, with multiplicity; 0 when there are none.
double percent_in_test_n(std::span<const Sentence> samples, const NGramIndex& index, std::size_t n);

/// Sentence set of a corpus with trailing eos removed, for novelty lookups.
class SentenceSet {
 public:
  explicit SentenceSet(const TokenizedCorpus& corpus);
  bool contains(std::span<const TokenId> sentence) const;

 private:
  struct Hash {
    std::size_t operator()(const Sentence& s) const noexcept;
  };
  std::unordered_set<Sentence, Hash> set_;
};

/// Share of generated sentences (with multiplicity) not present verbatim in
/// the corpus. Trailing eos is ignored on both sides.
double novelty_score(std::span<const Sentence> generated, const SentenceSet& corpus);
double novelty_score(std::span<const Sentence> generated, const TokenizedCorpus& corpus);

struct EvalReport {
  std::uint64_t iteration = 0;
  std::array<double, kMaxNgram> percent_in_test{};  // index n-1
  double novelty = 0.0;
  std::size_t sample_count = 0;
  std::vector<Sentence> samples;

  /// Human-readable summary followed by a `[metrics]` key=value block.
  void write(std::ostream& out) const;
  /// One decoded sample per line.
  void write_samples(std::ostream& out, const Vocabulary& vocab, TokenLevel level) const;
};

struct EvalOptions {
  std::size_t count = kDefaultEvalCount;
  std::size_t length = 5;
  std::size_t chunk = 128;
};

/// Draws `count` sequences (noise -> generate -> argmax), then scores them.
EvalReport evaluate(const Generator& gen, const NGramIndex& index, const SentenceSet& corpus,
                    const EvalOptions& options, Rng& rng);

/// Draws `count` argmax samples without scoring them.
std::vector<Sentence> draw_samples(const Generator& gen, std::size_t count, std::size_t length,
                                   std::size_t chunk, Rng& rng);

}  // namespace lipgan
