#include "lipgan/corpus.hpp"

#include <algorithm>
#include <istream>
#include <iostream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "lipgan/errors.hpp"
#include "lipgan/rng.hpp"

namespace lipgan {

TokenLevel parse_token_level(std::string_view text) {
  if (text == "word") return TokenLevel::word;
  if (text == "character" || text == "char") return TokenLevel::character;
  throw ConfigError("unknown tokenization level '" + std::string(text) + "'");
}

std::string_view to_string(TokenLevel level) {
  return level == TokenLevel::word ? "word" : "character";
}

// ------------------------------------------------------------ Vocabulary

Vocabulary::Vocabulary() {
  add(std::string(kUnk));
  add(std::string(kPad));
  add(std::string(kEos));
}

TokenId Vocabulary::add(std::string token) {
  if (ids_.contains(token)) throw Error("vocabulary: duplicate token '" + token + "'");
  const auto id = static_cast<TokenId>(tokens_.size());
  ids_.emplace(token, id);
  tokens_.push_back(std::move(token));
  return id;
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

TokenId Vocabulary::id(std::string_view token) const { return find(token).value_or(unk_id()); }

const std::string& Vocabulary::token(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw Error("vocabulary: id " + std::to_string(id) + " out of range");
  }
  return tokens_[static_cast<std::size_t>(id)];
}

void Vocabulary::save(std::ostream& out) const {
  for (const auto& t : tokens_) out << t << '\n';
}

Vocabulary Vocabulary::load(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  if (lines.size() < 3 || lines[0] != kUnk || lines[1] != kPad || lines[2] != kEos) {
    throw IoError("vocabulary file: missing reserved tokens on lines 1-3");
  }
  Vocabulary v;
  for (std::size_t i = 3; i < lines.size(); ++i) v.add(lines[i]);
  return v;
}

// ------------------------------------------------------------ tokenize

namespace {

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;  // stray continuation byte: treat as its own token
}

// Cuts at most `cap` bytes without splitting a UTF-8 sequence.
std::string_view truncate_utf8(std::string_view s, std::size_t cap) {
  if (s.size() <= cap) return s;
  std::size_t end = cap;
  while (end > 0 && (static_cast<unsigned char>(s[end]) & 0xC0) == 0x80) --end;
  return s.substr(0, end);
}

std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(std::move(line));
  return lines;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view line, TokenLevel level) {
  std::vector<std::string> out;
  if (level == TokenLevel::word) {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && is_ascii_space(line[i])) ++i;
      const std::size_t start = i;
      while (i < line.size() && !is_ascii_space(line[i])) ++i;
      if (i > start) out.emplace_back(line.substr(start, i - start));
    }
    return out;
  }
  std::size_t i = 0;
  while (i < line.size()) {
    const std::size_t n = std::min(utf8_length(static_cast<unsigned char>(line[i])), line.size() - i);
    out.emplace_back(line.substr(i, n));
    i += n;
  }
  return out;
}

// ------------------------------------------------------------ ingest

TokenizedCorpus ingest(std::span<const std::string> lines, const IngestOptions& options) {
  if (options.max_vocab < 3) throw ConfigError("max_vocab must be at least 3 (reserved tokens)");

  // Exact-duplicate lines go first, keeping the first occurrence.
  std::vector<std::vector<std::string>> tokenized;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  for (const auto& raw : lines) {
    ++line_no;
    std::string_view text = raw;
    if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
    if (text.size() > options.max_line_bytes) {
      std::clog << "warning: line " << line_no << " longer than " << options.max_line_bytes
                << " bytes; truncated\n";
      text = truncate_utf8(text, options.max_line_bytes);
    }
    auto tokens = tokenize(text, options.level);
    if (tokens.empty()) continue;
    if (!seen.insert(std::string(text)).second) continue;
    tokenized.push_back(std::move(tokens));
  }
  if (tokenized.empty()) throw Error("empty corpus");

  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& s : tokenized) {
    for (const auto& t : s) {
      if (t == Vocabulary::kUnk || t == Vocabulary::kPad || t == Vocabulary::kEos) continue;
      ++counts[t];
    }
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  const std::size_t keep = std::min(ranked.size(), options.max_vocab - 3);

  TokenizedCorpus corpus;
  corpus.level = options.level;
  for (std::size_t i = 0; i < keep; ++i) corpus.vocab.add(ranked[i].first);

  // Dedup again on ids: two lines can collapse onto the same [unk] pattern.
  std::set<Sentence> unique;
  for (const auto& s : tokenized) {
    Sentence ids;
    ids.reserve(s.size() + 1);
    for (const auto& t : s) ids.push_back(corpus.vocab.id(t));
    ids.push_back(corpus.vocab.eos_id());
    if (unique.insert(ids).second) corpus.sentences.push_back(std::move(ids));
  }
  return corpus;
}

TokenizedCorpus ingest(std::istream& lines, const IngestOptions& options) {
  const auto all = read_lines(lines);
  return ingest(std::span<const std::string>(all), options);
}

std::string decode(std::span<const TokenId> sentence, const Vocabulary& vocab, TokenLevel level) {
  std::string out;
  bool first = true;
  for (TokenId id : sentence) {
    if (id == vocab.eos_id()) break;
    if (id == vocab.pad_id()) continue;
    if (level == TokenLevel::word && !first) out += ' ';
    out += vocab.token(id);
    first = false;
  }
  return out;
}

Sentence encode(std::string_view line, const Vocabulary& vocab, TokenLevel level) {
  Sentence ids;
  for (const auto& t : tokenize(line, level)) ids.push_back(vocab.id(t));
  ids.push_back(vocab.eos_id());
  return ids;
}

// ------------------------------------------------------------ partition

Split partition(const TokenizedCorpus& corpus, std::size_t parts, std::uint64_t seed) {
  if (parts < 2) throw ConfigError("partition: need at least 2 parts");
  const std::size_t n = corpus.sentences.size();
  if (parts > n) {
    throw Error("partition: " + std::to_string(parts) + " parts but only " + std::to_string(n) +
                " sentences");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(0, i - 1));
    std::swap(order[i - 1], order[j]);
  }
  std::vector<std::vector<std::size_t>> buckets(parts);
  for (std::size_t i = 0; i < n; ++i) buckets[i % parts].push_back(order[i]);

  Split split;
  split.train.vocab = split.heldout.vocab = corpus.vocab;
  split.train.level = split.heldout.level = corpus.level;
  for (std::size_t idx : buckets[0]) split.heldout.sentences.push_back(corpus.sentences[idx]);
  for (std::size_t p = 1; p < parts; ++p) {
    for (std::size_t idx : buckets[p]) split.train.sentences.push_back(corpus.sentences[idx]);
  }
  return split;
}

ad::Matrix one_hot(std::span<const TokenId> sentence, std::size_t vocab_size) {
  ad::Matrix m(sentence.size(), vocab_size);
  for (std::size_t t = 0; t < sentence.size(); ++t) {
    const TokenId id = sentence[t];
    if (id < 0 || static_cast<std::size_t>(id) >= vocab_size) {
      throw Error("one_hot: id " + std::to_string(id) + " out of range for vocabulary of " +
                  std::to_string(vocab_size));
    }
    m(t, static_cast<std::size_t>(id)) = 1.0;
  }
  return m;
}

}  // namespace lipgan
