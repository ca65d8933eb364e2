#pragma once

// Standardized bigram bag-of-words features for raw-text corpora.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sudo/error.hpp"
#include "sudo/matrix.hpp"

namespace sudo {

inline constexpr std::size_t kDefaultVocabularySize = 1000;
inline constexpr double kDefaultStdFloor = 1e-8;

struct BowVocabulary {
  std::vector<std::string> tokens;  // descending corpus frequency, ties lexicographic
  std::vector<double> token_mean;
  std::vector<double> token_std;    // floored

  std::size_t size() const { return tokens.size(); }

  std::unordered_map<std::string, std::size_t> index() const {
    std::unordered_map<std::string, std::size_t> out;
    for (std::size_t i = 0; i < tokens.size(); ++i) out.emplace(tokens[i], i);
    return out;
  }
};

// Lowercases, maps every non-alphanumeric character to a space and splits on
// whitespace.
inline std::vector<std::string> tokenize(std::string_view doc) {
  std::vector<std::string> words;
  std::string cur;
  for (unsigned char c : doc) {
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      words.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

inline std::vector<std::string> bigrams(std::string_view doc) {
  const auto words = tokenize(doc);
  std::vector<std::string> out;
  for (std::size_t i = 0; i + 1 < words.size(); ++i) out.push_back(words[i] + ' ' + words[i + 1]);
  return out;
}

namespace detail {

inline std::vector<double> bigram_counts(std::string_view doc,
                                         const std::unordered_map<std::string, std::size_t>& index) {
  std::vector<double> counts(index.size(), 0.0);
  for (const auto& bg : bigrams(doc)) {
    if (auto it = index.find(bg); it != index.end()) counts[it->second] += 1.0;
  }
  return counts;
}

}  // namespace detail

inline BowVocabulary build_bow_vocabulary(std::span<const std::string> corpus,
                                          std::size_t vocab_size = kDefaultVocabularySize,
                                          double std_floor = kDefaultStdFloor) {
  if (corpus.empty()) throw DataError("cannot build a vocabulary from an empty corpus");
  if (vocab_size == 0) throw ConfigError("vocab_size must be at least 1");

  std::map<std::string, std::size_t> freq;
  for (const auto& doc : corpus)
    for (auto& bg : bigrams(doc)) ++freq[std::move(bg)];

  std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(), freq.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > vocab_size) ranked.resize(vocab_size);

  BowVocabulary vocab;
  for (auto& [tok, _] : ranked) vocab.tokens.push_back(tok);
  const auto index = vocab.index();
  const std::size_t v = vocab.size();
  const double n = static_cast<double>(corpus.size());

  std::vector<std::vector<double>> rows;
  rows.reserve(corpus.size());
  for (const auto& doc : corpus) rows.push_back(detail::bigram_counts(doc, index));

  vocab.token_mean.assign(v, 0.0);
  vocab.token_std.assign(v, 0.0);
  for (const auto& row : rows)
    for (std::size_t j = 0; j < v; ++j) vocab.token_mean[j] += row[j];
  for (auto& m : vocab.token_mean) m /= n;
  for (const auto& row : rows)
    for (std::size_t j = 0; j < v; ++j) {
      const double d = row[j] - vocab.token_mean[j];
      vocab.token_std[j] += d * d;
    }
  for (auto& s : vocab.token_std) s = std::max(std::sqrt(s / n), std_floor);
  return vocab;
}

inline std::vector<double> featurize_document(std::string_view doc, const BowVocabulary& vocab) {
  auto x = detail::bigram_counts(doc, vocab.index());
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = (x[j] - vocab.token_mean[j]) / vocab.token_std[j];
  return x;
}

inline FeatureMatrix featurize_corpus(std::span<const std::string> docs, const BowVocabulary& vocab) {
  const auto index = vocab.index();
  FeatureMatrix out(docs.size(), vocab.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    auto counts = detail::bigram_counts(docs[i], index);
    auto row = out.row(i);
    for (std::size_t j = 0; j < counts.size(); ++j)
      row[j] = (counts[j] - vocab.token_mean[j]) / vocab.token_std[j];
  }
  return out;
}

}  // namespace sudo
