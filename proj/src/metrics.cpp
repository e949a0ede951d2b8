#include "mdseval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "mdseval/text.hpp"

namespace mdseval::metrics {

ScoreTriple ScoreTriple::from_pr(double p, double r) {
  ScoreTriple t;
  t.precision = p;
  t.recall = r;
  t.f1 = (p + r > 0.0) ? 2.0 * p * r / (p + r) : 0.0;
  return t;
}

std::vector<std::string> score_tokens(std::string_view raw, TokenUnit unit) {
  if (unit == TokenUnit::character)
    return text::char_tokens(text::normalize_for_match(raw));
  // word mode: width-fold, then split on whitespace
  std::vector<std::string> out;
  std::istringstream in(text::normalize_for_dedup(raw));
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

namespace {

std::map<std::vector<std::string>, int> ngram_counts(
    const std::vector<std::string>& tokens, int n) {
  std::map<std::vector<std::string>, int> counts;
  if (static_cast<int>(tokens.size()) < n) return counts;
  for (size_t i = 0; i + n <= tokens.size(); ++i)
    ++counts[std::vector<std::string>(tokens.begin() + i, tokens.begin() + i + n)];
  return counts;
}

}  // namespace

ScoreTriple rouge_n(std::string_view candidate, std::string_view reference,
                    int n, TokenUnit unit) {
  if (n < 1) throw InvalidOrderError("rouge_n requires n >= 1");
  const auto cand_counts = ngram_counts(score_tokens(candidate, unit), n);
  const auto ref_counts = ngram_counts(score_tokens(reference, unit), n);

  long cand_total = 0, ref_total = 0;
  for (const auto& [ngram, c] : cand_counts) cand_total += c;
  for (const auto& [ngram, c] : ref_counts) ref_total += c;
  if (cand_total == 0 || ref_total == 0) return {};

  // clipped multiset overlap
  long overlap = 0;
  for (const auto& [ngram, c] : ref_counts) {
    auto it = cand_counts.find(ngram);
    if (it != cand_counts.end()) overlap += std::min(c, it->second);
  }
  return ScoreTriple::from_pr(static_cast<double>(overlap) / cand_total,
                              static_cast<double>(overlap) / ref_total);
}

size_t lcs_length(const std::vector<std::string>& a,
                  const std::vector<std::string>& b) {
  const size_t n = a.size(), m = b.size();
  std::vector<size_t> prev(m + 1, 0), cur(m + 1, 0);
  for (size_t i = 1; i <= n; ++i) {
    for (size_t j = 1; j <= m; ++j) {
      if (a[i - 1] == b[j - 1])
        cur[j] = prev[j - 1] + 1;
      else
        cur[j] = std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

ScoreTriple rouge_l(std::string_view candidate, std::string_view reference,
                    TokenUnit unit) {
  const auto cand = score_tokens(candidate, unit);
  const auto ref = score_tokens(reference, unit);
  if (cand.empty() || ref.empty()) return {};
  const double lcs = static_cast<double>(lcs_length(cand, ref));
  return ScoreTriple::from_pr(lcs / cand.size(), lcs / ref.size());
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) return 0.0;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

ScoreTriple semantic_f1(std::string_view candidate, std::string_view reference,
                        TokenEncoder& encoder) {
  const auto cand = encoder.encode(candidate);
  const auto ref = encoder.encode(reference);
  if (cand.empty() || ref.empty()) return {};

  auto greedy = [](const std::vector<TokenEmbedding>& from,
                   const std::vector<TokenEmbedding>& to) {
    double total = 0.0;
    for (const TokenEmbedding& f : from) {
      double best = 0.0;
      for (const TokenEmbedding& t : to)
        best = std::max(best, cosine(f.vector, t.vector));
      total += best;
    }
    return total / from.size();
  };
  return ScoreTriple::from_pr(greedy(cand, ref), greedy(ref, cand));
}

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

HashingCharEncoder::HashingCharEncoder(size_t dimension) : dimension_(dimension) {}

std::vector<TokenEmbedding> HashingCharEncoder::encode(std::string_view raw) {
  std::vector<TokenEmbedding> out;
  for (const std::string& ch :
       text::char_tokens(text::normalize_for_match(raw))) {
    uint64_t state = 0xcbf29ce484222325ULL;
    for (unsigned char b : ch) state = (state ^ b) * 0x100000001b3ULL;
    std::vector<double> v(dimension_);
    double norm = 0.0;
    for (size_t i = 0; i < dimension_; ++i) {
      state = splitmix64(state);
      // map to [-1, 1)
      v[i] = static_cast<double>(static_cast<int64_t>(state >> 11)) /
             static_cast<double>(1ULL << 52) - 1.0;
      norm += v[i] * v[i];
    }
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    out.push_back({ch, std::move(v)});
  }
  return out;
}

std::string HashingCharEncoder::identity() const {
  return "hashing-char-" + std::to_string(dimension_);
}

}  // namespace mdseval::metrics
