#include "mdseval/recall_metrics.hpp"

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace mdseval {
namespace {

using recall::ElementKind;
using recall::KeyElement;
using recall::KeyElementSet;
using testing::StubDiscriminator;

data::GeneratedSummary summary_of(const std::string& text) {
  return {"i1", "sys", text, 0};
}

TEST(RenderElement, EventIsIdentity) {
  KeyElement e = KeyElement::event("暴雨来袭。");
  EXPECT_EQ(recall::render_element(e), "暴雨来袭。");
  EXPECT_EQ(*e.rendered, "暴雨来袭。");
}

TEST(RenderElement, CausalTemplates) {
  KeyElement cause = KeyElement::causal({"暴雨来袭", "道路被淹", data::CausalKind::cause});
  EXPECT_EQ(recall::render_element(cause), "因为暴雨来袭，所以道路被淹");
  KeyElement pre = KeyElement::causal(
      {"提前转移", "伤亡减少", data::CausalKind::precondition});
  EXPECT_EQ(recall::render_element(pre), "提前转移，在此前提下伤亡减少");
}

TEST(RenderElement, TemporalTemplate) {
  KeyElement e = KeyElement::temporal(data::TemporalRelation("A", "B"));
  EXPECT_EQ(recall::render_element(e), "A。随后，B");
}

TEST(RenderElement, ArgumentIsSurfaceForm) {
  KeyElement e = KeyElement::argument({"河北", data::ArgumentRole::location, {"冀"}});
  EXPECT_EQ(recall::render_element(e), "河北");
}

TEST(KeyElementSet, KindMismatchThrows) {
  EXPECT_THROW(KeyElementSet(ElementKind::event,
                             {KeyElement::argument({"甲", data::ArgumentRole::person, {}})}),
               ToolkitError);
}

TEST(RecallForKind, AllEntailed) {
  StubDiscriminator all([](auto, auto) { return 1; });
  KeyElementSet set(ElementKind::event, {KeyElement::event("甲。"),
                                         KeyElement::event("乙。"),
                                         KeyElement::event("丙。")});
  const auto result = recall::recall_for_kind(set, summary_of("任意"), all);
  ASSERT_TRUE(result.has_value());
  EXPECT_DOUBLE_EQ(result->recall, 1.0);
  EXPECT_EQ(result->entailed, 3);
  EXPECT_EQ(result->total, 3);
}

TEST(RecallForKind, NoneEntailed) {
  StubDiscriminator none([](auto, auto) { return 0; });
  KeyElementSet set(ElementKind::event, {KeyElement::event("甲。"),
                                         KeyElement::event("乙。"),
                                         KeyElement::event("丙。")});
  const auto result = recall::recall_for_kind(set, summary_of("任意"), none);
  ASSERT_TRUE(result.has_value());
  EXPECT_DOUBLE_EQ(result->recall, 0.0);
}

TEST(RecallForKind, TwoOfThreeEntailed) {
  StubDiscriminator pick([](std::string_view, std::string_view element) {
    return element == "甲。" || element == "丙。" ? 1 : 0;
  });
  KeyElementSet set(ElementKind::event, {KeyElement::event("甲。"),
                                         KeyElement::event("乙。"),
                                         KeyElement::event("丙。")});
  const auto result = recall::recall_for_kind(set, summary_of("任意"), pick);
  ASSERT_TRUE(result.has_value());
  EXPECT_DOUBLE_EQ(result->recall, 2.0 / 3.0);
  EXPECT_EQ(result->per_element[0].verdict, 1);
  EXPECT_EQ(result->per_element[1].verdict, 0);
  EXPECT_EQ(result->per_element[2].verdict, 1);
}

TEST(RecallForKind, EmptySetIsAbsent) {
  StubDiscriminator all([](auto, auto) { return 1; });
  KeyElementSet set(ElementKind::event, {});
  EXPECT_FALSE(recall::recall_for_kind(set, summary_of("任意"), all).has_value());
}

// Exhaustive Eq.(1) check over every verdict vector for |E| in 1..10.
TEST(RecallForKind, ExhaustiveVerdictVectorsMatchRatio) {
  for (int size = 1; size <= 10; ++size) {
    std::vector<KeyElement> elements;
    for (int i = 0; i < size; ++i)
      elements.push_back(KeyElement::event("句" + std::to_string(i) + "。"));
    KeyElementSet set(ElementKind::event, elements);
    for (uint32_t mask = 0; mask < (1u << size); ++mask) {
      StubDiscriminator stub([&](std::string_view, std::string_view element) {
        for (int i = 0; i < size; ++i)
          if (element == "句" + std::to_string(i) + "。")
            return (mask >> i) & 1u ? 1 : 0;
        return 0;
      });
      const auto result = recall::recall_for_kind(set, summary_of("任意"), stub);
      ASSERT_TRUE(result.has_value());
      const int expected = __builtin_popcount(mask);
      EXPECT_EQ(result->entailed, expected);
      EXPECT_DOUBLE_EQ(result->recall, static_cast<double>(expected) / size);
    }
  }
}

TEST(RecallForKind, DiscriminatorFailurePropagatesWithElement) {
  StubDiscriminator boom([](auto, auto) -> int {
    throw std::runtime_error("backend down");
  });
  KeyElementSet set(ElementKind::event, {KeyElement::event("甲。")});
  try {
    recall::recall_for_kind(set, summary_of("任意"), boom);
    FAIL() << "expected DiscriminatorError";
  } catch (const recall::DiscriminatorError& e) {
    EXPECT_NE(std::string(e.what()).find("甲。"), std::string::npos);
  }
}

data::Instance annotated_instance() {
  data::Instance instance = testing::make_instance("i1", 5);
  instance.reference_kind = data::ReferenceKind::human;
  instance.global_annotation = data::GlobalAnnotation{
      {"暴雨来袭。", "道路被淹。"},
      {{"河北", data::ArgumentRole::location, {"冀"}},
       {"7月29日", data::ArgumentRole::time, {}},
       {"救援队", data::ArgumentRole::organization, {}}},
      {{"暴雨来袭。", "道路被淹。", data::CausalKind::cause}}};
  instance.temporal = {data::TemporalRelation("暴雨来袭。", "道路被淹。")};
  return instance;
}

TEST(EvaluateSummary, AllEntailStubGivesOnesEverywhere) {
  StubDiscriminator all([](auto, auto) { return 1; });
  const auto results =
      recall::evaluate_summary(annotated_instance(), summary_of("任意"), all);
  ASSERT_EQ(results.size(), 4u);
  EXPECT_DOUBLE_EQ(results.at(ElementKind::event).recall, 1.0);
  EXPECT_DOUBLE_EQ(results.at(ElementKind::argument).recall, 1.0);
  EXPECT_DOUBLE_EQ(results.at(ElementKind::causal).recall, 1.0);
  EXPECT_DOUBLE_EQ(results.at(ElementKind::temporal).recall, 1.0);
}

TEST(EvaluateSummary, MissingAnnotationIsAbsentNotZero) {
  StubDiscriminator all([](auto, auto) { return 1; });
  data::Instance instance = testing::make_instance("i1", 5);
  instance.temporal = {data::TemporalRelation("甲。", "乙。")};
  const auto results =
      recall::evaluate_summary(instance, summary_of("任意"), all);
  ASSERT_EQ(results.size(), 1u);
  EXPECT_TRUE(results.count(ElementKind::temporal));
}

TEST(EvaluateSummary, DeterministicPerElementOrder) {
  auto oracle = recall::containment_oracle();
  const data::Instance instance = annotated_instance();
  const auto summary = summary_of("7月29日河北暴雨来袭。随后道路被淹。");
  const auto a = recall::evaluate_summary(instance, summary, *oracle);
  const auto b = recall::evaluate_summary(instance, summary, *oracle);
  ASSERT_EQ(a.size(), b.size());
  for (const auto& [kind, result] : a) {
    const auto& other = b.at(kind);
    ASSERT_EQ(result.per_element.size(), other.per_element.size());
    for (size_t i = 0; i < result.per_element.size(); ++i)
      EXPECT_EQ(result.per_element[i].verdict, other.per_element[i].verdict);
  }
}

TEST(ContainmentOracle, SubstringJudgments) {
  auto oracle = recall::containment_oracle();
  EXPECT_EQ(oracle->judge("灾害已致29人遇难，救援持续", "29人遇难"), 1);
  EXPECT_EQ(oracle->judge("灾害已致二十九人遇难", "29人遇难"), 0);
}

TEST(ContainmentOracle, NormalizesWhitespaceAndWidth) {
  auto oracle = recall::containment_oracle();
  EXPECT_EQ(oracle->judge("已致 ２９ 人遇难", "29人遇难"), 1);
}

TEST(ContainmentOracle, ArgumentCorefCounts) {
  auto oracle = recall::containment_oracle();
  KeyElement arg =
      KeyElement::argument({"河北", data::ArgumentRole::location, {"冀"}});
  recall::render_element(arg);
  EXPECT_EQ(oracle->judge_element("冀中南部出现强降雨", arg), 1);
  EXPECT_EQ(oracle->judge_element("华北出现强降雨", arg), 0);
}

TEST(Monotonicity, AddingEntailedElementNeverDecreasesCount) {
  StubDiscriminator odd([](std::string_view, std::string_view element) {
    return element.size() % 2 ? 1 : 0;
  });
  std::vector<KeyElement> elements;
  int prev_entailed = 0;
  for (int i = 0; i < 8; ++i) {
    elements.push_back(KeyElement::event(std::string(i + 1, 'a')));
    KeyElementSet set(ElementKind::event, elements);
    const auto result = recall::recall_for_kind(set, summary_of("x"), odd);
    ASSERT_TRUE(result.has_value());
    EXPECT_GE(result->entailed, prev_entailed);
    EXPECT_DOUBLE_EQ(result->recall,
                     static_cast<double>(result->entailed) / result->total);
    prev_entailed = result->entailed;
  }
}

}  // namespace
}  // namespace mdseval
