#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mrkit/errors.hpp"
#include "mrkit/mr.hpp"

namespace mrkit {

// Corpus-level BLEU-4 over single-reference pairs: clipped modified n-gram
// precisions, uniform 1/4 weights, geometric mean, and the standard brevity
// penalty. Responses are scored on their surface text, so tokenization drops
// the structural bracket tokens unless asked to keep them.

inline std::vector<std::string> bleu_tokens(std::string_view text,
                                            bool keep_structure = false) {
  std::vector<std::string> out;
  for (const Token& token : tokenize(text))
    if (keep_structure || token.kind == TokenKind::Term)
      out.push_back(token_text(token));
  return out;
}

struct BleuBreakdown {
  std::array<double, 4> precisions{};
  double brevity_penalty = 0.0;
  double score = 0.0;
  std::size_t candidate_length = 0;
  std::size_t reference_length = 0;
};

using TokenizedPair = std::pair<std::vector<std::string>, std::vector<std::string>>;

namespace detail {

// n-grams as joined keys; '\x1f' cannot appear in whitespace tokens.
inline std::map<std::string, std::size_t> ngram_counts(
    const std::vector<std::string>& tokens, std::size_t n) {
  std::map<std::string, std::size_t> counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (std::size_t j = 1; j < n; ++j) {
      key += '\x1f';
      key += tokens[i + j];
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace detail

inline BleuBreakdown corpus_bleu_breakdown(
    const std::vector<TokenizedPair>& pairs) {
  if (pairs.empty()) throw EmptyCorpus();

  BleuBreakdown out;
  std::array<std::size_t, 4> clipped{};
  std::array<std::size_t, 4> total{};
  for (const auto& [candidate, reference] : pairs) {
    out.candidate_length += candidate.size();
    out.reference_length += reference.size();
    for (std::size_t n = 1; n <= 4; ++n) {
      if (candidate.size() < n) continue;
      total[n - 1] += candidate.size() - n + 1;
      const auto cand = detail::ngram_counts(candidate, n);
      const auto ref = detail::ngram_counts(reference, n);
      for (const auto& [gram, count] : cand) {
        auto it = ref.find(gram);
        if (it != ref.end()) clipped[n - 1] += std::min(count, it->second);
      }
    }
  }

  const double c = static_cast<double>(out.candidate_length);
  const double r = static_cast<double>(out.reference_length);
  out.brevity_penalty =
      out.candidate_length == 0
          ? 0.0
          : (c > r ? 1.0 : std::exp(1.0 - r / c));

  double log_sum = 0.0;
  bool zero = false;
  for (std::size_t n = 0; n < 4; ++n) {
    out.precisions[n] =
        total[n] == 0 ? 0.0
                      : static_cast<double>(clipped[n]) /
                            static_cast<double>(total[n]);
    if (out.precisions[n] == 0.0)
      zero = true;
    else
      log_sum += 0.25 * std::log(out.precisions[n]);
  }
  out.score = zero ? 0.0 : out.brevity_penalty * std::exp(log_sum);
  return out;
}

inline double corpus_bleu(const std::vector<TokenizedPair>& pairs) {
  return corpus_bleu_breakdown(pairs).score;
}

}  // namespace mrkit
