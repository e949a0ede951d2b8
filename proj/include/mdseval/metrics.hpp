#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mdseval/data_model.hpp"

namespace mdseval::metrics {

struct ScoreTriple {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  static ScoreTriple from_pr(double p, double r);
};

struct InvalidOrderError : ToolkitError {
  using ToolkitError::ToolkitError;
};

// Character is the unit for Chinese scoring; the word mode splits on
// whitespace and is off by default.
enum class TokenUnit { character, word };

// Tokens after scoring normalization (whitespace stripped for character
// mode, widths folded in both modes).
std::vector<std::string> score_tokens(std::string_view text,
                                      TokenUnit unit = TokenUnit::character);

ScoreTriple rouge_n(std::string_view candidate, std::string_view reference,
                    int n, TokenUnit unit = TokenUnit::character);
ScoreTriple rouge_l(std::string_view candidate, std::string_view reference,
                    TokenUnit unit = TokenUnit::character);

size_t lcs_length(const std::vector<std::string>& a,
                  const std::vector<std::string>& b);

struct TokenEmbedding {
  std::string token;
  std::vector<double> vector;
};

struct TokenEncoder {
  virtual ~TokenEncoder() = default;
  virtual std::vector<TokenEmbedding> encode(std::string_view text) = 0;
  virtual std::string identity() const = 0;
};

struct EncoderError : ToolkitError {
  using ToolkitError::ToolkitError;
};

double cosine(const std::vector<double>& a, const std::vector<double>& b);

// Greedy token matching: recall is the mean over reference tokens of the
// best cosine similarity to any candidate token, precision symmetric.
ScoreTriple semantic_f1(std::string_view candidate, std::string_view reference,
                        TokenEncoder& encoder);

// Deterministic local encoder: one pseudo-random unit vector per character,
// derived from the character alone. Serves as the offline semantic profile;
// a learned encoder can be injected behind the same interface.
class HashingCharEncoder : public TokenEncoder {
 public:
  explicit HashingCharEncoder(size_t dimension = 64);
  std::vector<TokenEmbedding> encode(std::string_view text) override;
  std::string identity() const override;

 private:
  size_t dimension_;
};

}  // namespace mdseval::metrics
