#include "lipgan/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "lipgan/errors.hpp"

namespace lipgan {

std::size_t NGramHash::operator()(const NGram& g) const noexcept {
  std::uint64_t h = 1469598103934665603ull;
  for (TokenId id : g) {
    h ^= static_cast<std::uint32_t>(id);
    h *= 1099511628211ull;
  }
  return static_cast<std::size_t>(h);
}

namespace {

NGram make_key(std::span<const TokenId> tokens) {
  NGram key;
  key.fill(-1);
  std::copy(tokens.begin(), tokens.end(), key.begin());
  return key;
}

std::string format_fraction(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

}  // namespace

NGramIndex NGramIndex::build(const TokenizedCorpus& heldout, std::size_t max_n) {
  if (heldout.sentences.empty()) throw Error("build_index: empty corpus");
  if (max_n < 1 || max_n > kMaxNgram) throw Error("build_index: max_n must lie in [1, 4]");
  NGramIndex index;
  index.sets_.resize(max_n);
  for (const auto& s : heldout.sentences) {
    for (std::size_t n = 1; n <= max_n; ++n) {
      for_each_ngram(s, n, [&](std::size_t start, std::size_t len) {
        index.sets_[n - 1].insert(make_key(std::span<const TokenId>(s).subspan(start, len)));
      });
    }
  }
  return index;
}

bool NGramIndex::contains(std::span<const TokenId> ngram) const {
  const std::size_t n = ngram.size();
  if (n < 1 || n > sets_.size()) return false;
  return sets_[n - 1].contains(make_key(ngram));
}

namespace serial {
NGramCounts count_ngrams(std::span<const Sentence> samples, const NGramIndex& index, std::size_t n) {
  NGramCounts c;
  for (const auto& s : samples) {
    for_each_ngram(s, n, [&](std::size_t start, std::size_t len) {
      ++c.total;
      if (index.contains(std::span<const TokenId>(s).subspan(start, len))) ++c.hits;
    });
  }
  return c;
}
}  // namespace serial

namespace parallel {
NGramCounts count_ngrams(std::span<const Sentence> samples, const NGramIndex& index, std::size_t n) {
  std::uint64_t hits = 0;
  std::uint64_t total = 0;
  const auto count = static_cast<std::ptrdiff_t>(samples.size());
#pragma omp parallel for reduction(+ : hits, total) schedule(static) if (count >= 256)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const Sentence& s = samples[static_cast<std::size_t>(i)];
    for_each_ngram(s, n, [&](std::size_t start, std::size_t len) {
      ++total;
      if (index.contains(std::span<const TokenId>(s).subspan(start, len))) ++hits;
    });
  }
  return {hits, total};
}
}  // namespace parallel

double percent_in_test_n(std::span<const Sentence> samples, const NGramIndex& index, std::size_t n) {
  if (n < 1 || n > kMaxNgram) throw Error("percent_in_test_n: n must lie in [1, 4]");
  const auto c = parallel::count_ngrams(samples, index, n);
  return c.total == 0 ? 0.0 : static_cast<double>(c.hits) / static_cast<double>(c.total);
}

std::size_t SentenceSet::Hash::operator()(const Sentence& s) const noexcept {
  std::uint64_t h = 1469598103934665603ull;
  for (TokenId id : s) {
    h ^= static_cast<std::uint32_t>(id);
    h *= 1099511628211ull;
  }
  return static_cast<std::size_t>(h ^ s.size());
}

namespace {
Sentence strip_eos(std::span<const TokenId> s) {
  auto end = s.end();
  while (end != s.begin() && *(end - 1) == Vocabulary::kEosId) --end;
  return Sentence(s.begin(), end);
}
}  // namespace

SentenceSet::SentenceSet(const TokenizedCorpus& corpus) {
  for (const auto& s : corpus.sentences) set_.insert(strip_eos(s));
}

bool SentenceSet::contains(std::span<const TokenId> sentence) const { return set_.contains(strip_eos(sentence)); }

double novelty_score(std::span<const Sentence> generated, const SentenceSet& corpus) {
  if (generated.empty()) throw Error("novelty_score: no generated sentences");
  std::size_t novel = 0;
  for (const auto& s : generated) {
    if (!corpus.contains(s)) ++novel;
  }
  return static_cast<double>(novel) / static_cast<double>(generated.size());
}

double novelty_score(std::span<const Sentence> generated, const TokenizedCorpus& corpus) {
  return novelty_score(generated, SentenceSet(corpus));
}

void EvalReport::write(std::ostream& out) const {
  out << "evaluation at iteration " << iteration << " over " << sample_count << " samples\n";
  for (std::size_t n = 1; n <= kMaxNgram; ++n) {
    out << "  %-IN-TEST-" << n << ": " << format_fraction(percent_in_test[n - 1]) << '\n';
  }
  out << "  novelty: " << format_fraction(novelty) << '\n';
  out << "[metrics]\n";
  out << "iteration=" << iteration << '\n';
  out << "sample_count=" << sample_count << '\n';
  for (std::size_t n = 1; n <= kMaxNgram; ++n) {
    out << "percent_in_test_" << n << '=' << format_fraction(percent_in_test[n - 1]) << '\n';
  }
  out << "novelty=" << format_fraction(novelty) << '\n';
}

void EvalReport::write_samples(std::ostream& out, const Vocabulary& vocab, TokenLevel level) const {
  for (const auto& s : samples) out << decode(s, vocab, level) << '\n';
}

std::vector<Sentence> draw_samples(const Generator& gen, std::size_t count, std::size_t length,
                                   std::size_t chunk, Rng& rng) {
  ad::NoGrad off;
  std::vector<Sentence> out;
  out.reserve(count);
  chunk = std::max<std::size_t>(chunk, 1);
  while (out.size() < count) {
    const std::size_t b = std::min(chunk, count - out.size());
    const auto noise = sample_noise(rng, b, gen.shape().noise_dim);
    const auto soft = generate(gen, noise, length);
    for (std::size_t i = 0; i < b; ++i) {
      out.push_back(sample_hard(soft.sample(i), SampleMode::argmax, rng, Vocabulary::kEosId));
    }
  }
  return out;
}

EvalReport evaluate(const Generator& gen, const NGramIndex& index, const SentenceSet& corpus,
                    const EvalOptions& options, Rng& rng) {
  EvalReport report;
  report.samples = draw_samples(gen, options.count, options.length, options.chunk, rng);
  report.sample_count = report.samples.size();
  for (std::size_t n = 1; n <= std::min(kMaxNgram, index.max_n()); ++n) {
    report.percent_in_test[n - 1] = percent_in_test_n(report.samples, index, n);
  }
  report.novelty = report.samples.empty() ? 0.0 : novelty_score(report.samples, corpus);
  return report;
}

}  // namespace lipgan
