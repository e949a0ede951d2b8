#include "mdseval/metrics.hpp"

#include <cmath>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "mdseval/text.hpp"
#include "test_support.hpp"

namespace mdseval {
namespace {

using metrics::ScoreTriple;
using metrics::TokenEmbedding;

TEST(RougeN, IdenticalStrings) {
  const ScoreTriple t = metrics::rouge_n("甲乙丙", "甲乙丙", 1);
  EXPECT_DOUBLE_EQ(t.precision, 1.0);
  EXPECT_DOUBLE_EQ(t.recall, 1.0);
  EXPECT_DOUBLE_EQ(t.f1, 1.0);
}

// Unigram multisets: candidate {甲,乙,丙,丁}, reference {甲,丙,丁};
// overlap 3 -> p = 3/4, r = 1, f1 = 6/7. Cross-checked by the brute-force
// counter below.
TEST(RougeN, HandEnumeratedUnigrams) {
  const ScoreTriple t = metrics::rouge_n("甲乙丙丁", "甲丙丁", 1);
  EXPECT_DOUBLE_EQ(t.precision, 0.75);
  EXPECT_DOUBLE_EQ(t.recall, 1.0);
  EXPECT_NEAR(t.f1, 0.8571, 1e-4);

  const ScoreTriple oracle = testing::brute_force_rouge_n(
      metrics::score_tokens("甲乙丙丁"), metrics::score_tokens("甲丙丁"), 1);
  EXPECT_DOUBLE_EQ(t.precision, oracle.precision);
  EXPECT_DOUBLE_EQ(t.recall, oracle.recall);
  EXPECT_DOUBLE_EQ(t.f1, oracle.f1);
}

TEST(RougeN, DisjointBigrams) {
  const ScoreTriple t = metrics::rouge_n("甲乙", "丙丁", 2);
  EXPECT_DOUBLE_EQ(t.precision, 0.0);
  EXPECT_DOUBLE_EQ(t.recall, 0.0);
  EXPECT_DOUBLE_EQ(t.f1, 0.0);
}

TEST(RougeN, RepetitionIsClipped) {
  // candidate 甲甲甲 vs reference 甲: overlap clips to 1
  const ScoreTriple t = metrics::rouge_n("甲甲甲", "甲乙", 1);
  EXPECT_DOUBLE_EQ(t.precision, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(t.recall, 0.5);
}

TEST(RougeN, InvalidOrderThrows) {
  EXPECT_THROW(metrics::rouge_n("甲", "甲", 0), metrics::InvalidOrderError);
}

TEST(RougeN, NormalizationAppliesBeforeScoring) {
  const ScoreTriple t = metrics::rouge_n(" 甲　乙 ", "甲乙", 1);
  EXPECT_DOUBLE_EQ(t.f1, 1.0);
}

// LCS of 甲乙丙丁 vs 甲丙乙丁 is 3 (甲乙丁 or 甲丙丁): p = r = f1 = 0.75.
// The expected length comes from the exhaustive-subsequence oracle.
TEST(RougeL, HandEnumeratedLcs) {
  ASSERT_EQ(testing::exhaustive_lcs(metrics::score_tokens("甲乙丙丁"),
                                    metrics::score_tokens("甲丙乙丁")),
            3u);
  const ScoreTriple t = metrics::rouge_l("甲乙丙丁", "甲丙乙丁");
  EXPECT_DOUBLE_EQ(t.precision, 0.75);
  EXPECT_DOUBLE_EQ(t.recall, 0.75);
  EXPECT_DOUBLE_EQ(t.f1, 0.75);
}

TEST(RougeL, IdenticalAndEmpty) {
  const ScoreTriple same = metrics::rouge_l("甲乙丙", "甲乙丙");
  EXPECT_DOUBLE_EQ(same.f1, 1.0);
  const ScoreTriple empty = metrics::rouge_l("", "甲");
  EXPECT_DOUBLE_EQ(empty.precision, 0.0);
  EXPECT_DOUBLE_EQ(empty.recall, 0.0);
  EXPECT_DOUBLE_EQ(empty.f1, 0.0);
}

TEST(RougeL, RandomPairsMatchExhaustiveOracle) {
  const std::vector<std::string> alphabet = {"甲", "乙", "丙", "丁"};
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    auto make = [&] {
      std::string s;
      const size_t len = rng() % 9;
      for (size_t i = 0; i < len; ++i) s += alphabet[rng() % alphabet.size()];
      return s;
    };
    const std::string a = make(), b = make();
    const auto ta = metrics::score_tokens(a), tb = metrics::score_tokens(b);
    EXPECT_EQ(metrics::lcs_length(ta, tb), testing::exhaustive_lcs(ta, tb))
        << a << " vs " << b;
  }
}

TEST(RougeProperties, LcsBoundsAndSharedSuffixMonotonicity) {
  const std::vector<std::string> alphabet = {"甲", "乙", "丙", "丁"};
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    auto make = [&] {
      std::string s;
      const size_t len = 1 + rng() % 7;
      for (size_t i = 0; i < len; ++i) s += alphabet[rng() % alphabet.size()];
      return s;
    };
    const std::string a = make(), b = make();
    const auto ta = metrics::score_tokens(a), tb = metrics::score_tokens(b);
    const size_t lcs = metrics::lcs_length(ta, tb);
    EXPECT_LE(lcs, std::min(ta.size(), tb.size()));
    const size_t lcs_suffixed = metrics::lcs_length(
        metrics::score_tokens(a + "戊"), metrics::score_tokens(b + "戊"));
    EXPECT_GE(lcs_suffixed, lcs);
  }
}

TEST(RougeProperties, TriplesStayInUnitCubeWithF1Identity) {
  const std::vector<std::string> alphabet = {"甲", "乙", "丙", "丁"};
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 60; ++trial) {
    auto make = [&] {
      std::string s;
      const size_t len = rng() % 8;
      for (size_t i = 0; i < len; ++i) s += alphabet[rng() % alphabet.size()];
      return s;
    };
    for (int n = 1; n <= 2; ++n) {
      const ScoreTriple t = metrics::rouge_n(make(), make(), n);
      EXPECT_GE(t.precision, 0.0);
      EXPECT_LE(t.precision, 1.0);
      EXPECT_GE(t.recall, 0.0);
      EXPECT_LE(t.recall, 1.0);
      const double expected_f1 =
          t.precision + t.recall > 0
              ? 2 * t.precision * t.recall / (t.precision + t.recall)
              : 0.0;
      EXPECT_NEAR(t.f1, expected_f1, 1e-9);
    }
  }
}

class FixedEncoder : public metrics::TokenEncoder {
 public:
  explicit FixedEncoder(std::map<std::string, std::vector<double>> table)
      : table_(std::move(table)) {}
  std::vector<TokenEmbedding> encode(std::string_view raw) override {
    std::vector<TokenEmbedding> out;
    for (const std::string& ch : text::char_tokens(std::string(raw))) {
      auto it = table_.find(ch);
      if (it != table_.end()) out.push_back({ch, it->second});
    }
    return out;
  }
  std::string identity() const override { return "fixed"; }

 private:
  std::map<std::string, std::vector<double>> table_;
};

TEST(SemanticF1, IdenticalTextIsPerfect) {
  FixedEncoder enc({{"甲", {1, 0}}, {"乙", {0, 1}}});
  const ScoreTriple t = metrics::semantic_f1("甲乙", "甲乙", enc);
  EXPECT_NEAR(t.precision, 1.0, 1e-12);
  EXPECT_NEAR(t.recall, 1.0, 1e-12);
  EXPECT_NEAR(t.f1, 1.0, 1e-12);
}

TEST(SemanticF1, OrthogonalVectorsScoreZero) {
  FixedEncoder enc({{"甲", {1, 0}}, {"乙", {0, 1}}});
  const ScoreTriple t = metrics::semantic_f1("甲", "乙", enc);
  EXPECT_DOUBLE_EQ(t.precision, 0.0);
  EXPECT_DOUBLE_EQ(t.recall, 0.0);
  EXPECT_DOUBLE_EQ(t.f1, 0.0);
}

// Two candidate tokens against three reference tokens with a known cosine
// table. With unit vectors at fixed angles:
//   cos(甲,丙)=1, cos(甲,丁)=0, cos(甲,戊)=cos45, cos(乙,丙)=0, cos(乙,丁)=1,
//   cos(乙,戊)=cos45.
// precision = mean(max per candidate) = (1+1)/2 = 1
// recall    = mean(max per reference) = (1+1+cos45)/3
TEST(SemanticF1, HandComputedGreedyMatch) {
  const double c45 = std::sqrt(0.5);
  FixedEncoder enc({{"甲", {1, 0}},
                    {"乙", {0, 1}},
                    {"丙", {1, 0}},
                    {"丁", {0, 1}},
                    {"戊", {c45, c45}}});
  const ScoreTriple t = metrics::semantic_f1("甲乙", "丙丁戊", enc);
  const double expected_recall = (1.0 + 1.0 + c45) / 3.0;
  EXPECT_NEAR(t.precision, 1.0, 1e-12);
  EXPECT_NEAR(t.recall, expected_recall, 1e-12);
  EXPECT_NEAR(t.f1, 2 * expected_recall / (1 + expected_recall), 1e-12);
}

TEST(SemanticF1, EmptyEncodingGivesZeroTriple) {
  FixedEncoder enc({});
  const ScoreTriple t = metrics::semantic_f1("甲", "乙", enc);
  EXPECT_DOUBLE_EQ(t.f1, 0.0);
}

TEST(HashingCharEncoder, DeterministicUnitVectors) {
  metrics::HashingCharEncoder enc(32);
  const auto a = enc.encode("甲乙");
  const auto b = enc.encode("甲乙");
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0].vector, b[0].vector);
  EXPECT_NEAR(metrics::cosine(a[0].vector, a[0].vector), 1.0, 1e-9);
  EXPECT_LT(std::abs(metrics::cosine(a[0].vector, a[1].vector)), 0.9);
}

}  // namespace
}  // namespace mdseval
