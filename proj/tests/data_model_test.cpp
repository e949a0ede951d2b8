#include "mdseval/data_model.hpp"

#include <algorithm>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "test_support.hpp"

namespace mdseval {
namespace {

using data::Instance;
using data::ValidationCode;
using nlohmann::json;
using testing::make_instance;

bool has_issue(const std::vector<data::ValidationIssue>& issues,
               ValidationCode code) {
  return std::any_of(issues.begin(), issues.end(),
                     [&](const auto& i) { return i.code == code; });
}

TEST(ValidateInstance, ElevenDocumentsAccepted) {
  const Instance ok = data::validate_instance(make_instance("i1", 11));
  EXPECT_EQ(ok.documents.size(), 11u);
}

TEST(ValidateInstance, FourDocumentsRejected) {
  const auto issues = data::validate(make_instance("i1", 4));
  EXPECT_TRUE(has_issue(issues, ValidationCode::document_count_out_of_range));
  EXPECT_THROW(data::validate_instance(make_instance("i1", 4)),
               data::ValidationError);
}

TEST(ValidateInstance, TwentyOneDocumentsRejected) {
  const auto issues = data::validate(make_instance("i1", 21));
  EXPECT_TRUE(has_issue(issues, ValidationCode::document_count_out_of_range));
}

TEST(ValidateInstance, CollectsEveryViolation) {
  Instance bad = make_instance("i1", 3, "");
  bad.documents[0].body = "";
  bad.documents[1].doc_id = bad.documents[2].doc_id;
  bad.global_annotation = data::GlobalAnnotation{
      {"子事件甲。", "子事件甲。"},
      {},
      {{"子事件甲。", "不存在的句子。", data::CausalKind::cause}}};
  // annotation on an auto reference is itself a violation
  const auto issues = data::validate(bad);
  EXPECT_TRUE(has_issue(issues, ValidationCode::document_count_out_of_range));
  EXPECT_TRUE(has_issue(issues, ValidationCode::empty_reference));
  EXPECT_TRUE(has_issue(issues, ValidationCode::empty_document_body));
  EXPECT_TRUE(has_issue(issues, ValidationCode::duplicate_doc_id));
  EXPECT_TRUE(has_issue(issues, ValidationCode::duplicate_sub_event));
  EXPECT_TRUE(has_issue(issues, ValidationCode::dangling_causal_endpoint));
  EXPECT_TRUE(
      has_issue(issues, ValidationCode::annotation_requires_human_reference));
  EXPECT_GE(issues.size(), 6u);
}

TEST(ValidateInstance, IsPure) {
  const Instance candidate = make_instance("i1", 4);
  const auto first = data::validate(candidate);
  const auto second = data::validate(candidate);
  ASSERT_EQ(first.size(), second.size());
  for (size_t i = 0; i < first.size(); ++i)
    EXPECT_EQ(first[i].code, second[i].code);
}

TEST(TemporalRelation, AfterNormalizesToBefore) {
  const data::TemporalRelation rel("甲发生。", "乙发生。",
                                   data::TemporalOrder::after);
  EXPECT_EQ(rel.earlier, "乙发生。");
  EXPECT_EQ(rel.later, "甲发生。");
  EXPECT_EQ(data::to_json(rel).at("relation").get<std::string>(), "before");
}

TEST(TemporalRelation, JsonAfterIsSwappedOnParse) {
  const auto rel = data::temporal_from_json(
      json{{"earlier", "甲"}, {"later", "乙"}, {"relation", "after"}});
  EXPECT_EQ(rel.earlier, "乙");
  EXPECT_EQ(rel.later, "甲");
}

TEST(Splits, ParseAndFilename) {
  EXPECT_EQ(data::parse_split("train"), data::Split::train);
  EXPECT_EQ(data::split_filename(data::Split::dev), "dev.jsonl");
  EXPECT_THROW(data::parse_split("validation"), data::UnknownSplitError);
}

TEST(LoadCorpus, ThreeValidRecordsInFileOrder) {
  const auto dir = testing::fresh_temp_dir("corpus");
  std::vector<Instance> instances = {make_instance("a", 5), make_instance("b", 6),
                                     make_instance("c", 7)};
  data::save_corpus_file(dir / "test.jsonl", instances);
  const auto loaded = data::load_corpus(dir, data::Split::test);
  ASSERT_EQ(loaded.size(), 3u);
  EXPECT_EQ(loaded[0].instance_id, "a");
  EXPECT_EQ(loaded[1].instance_id, "b");
  EXPECT_EQ(loaded[2].instance_id, "c");
  std::filesystem::remove_all(dir);
}

TEST(LoadCorpus, MalformedSecondLineNamed) {
  const auto dir = testing::fresh_temp_dir("corpus_bad");
  const std::string good = data::serialize_instance(make_instance("a", 5));
  testing::write_file(dir / "test.jsonl", good + "\n{not json}\n");
  try {
    data::load_corpus(dir, data::Split::test);
    FAIL() << "expected MalformedRecordError";
  } catch (const data::MalformedRecordError& e) {
    EXPECT_EQ(e.line_number, 2u);
  }
  std::filesystem::remove_all(dir);
}

TEST(LoadCorpus, InvalidInstanceIsMalformed) {
  const auto dir = testing::fresh_temp_dir("corpus_invalid");
  Instance four_docs = make_instance("a", 4);
  testing::write_file(dir / "test.jsonl",
                      data::serialize_instance(four_docs) + "\n");
  EXPECT_THROW(data::load_corpus(dir, data::Split::test),
               data::MalformedRecordError);
  std::filesystem::remove_all(dir);
}

TEST(RoundTrip, CanonicalSerializationIsStable) {
  const auto dir = testing::fresh_temp_dir("roundtrip");
  // shuffled key order and an `after` relation both normalize away
  Instance original = make_instance("a", 5);
  original.temporal.emplace_back("乙句。", "甲句。", data::TemporalOrder::after);
  original.event_date = data::Date{2023, 7, 29};
  original.card = {{"time", "2023年7月29日"}, {"地点", "河北"}};
  json j = data::to_json(original);
  std::string scrambled =
      "{\"reference\":\"参考摘要内容。\",\"instance_id\":\"a\",\"event_title\":"
      "\"事件a\",\"documents\":" + j.at("documents").dump() +
      ",\"temporal\":[{\"relation\":\"after\",\"earlier\":\"甲句。\",\"later\":"
      "\"乙句。\"}],\"reference_kind\":\"auto\",\"event_date\":\"2023-07-29\","
      "\"card\":{\"地点\":\"河北\",\"time\":\"2023年7月29日\"}}";
  testing::write_file(dir / "test.jsonl", scrambled + "\n");

  const auto first_load = data::load_corpus(dir, data::Split::test);
  data::save_corpus_file(dir / "canonical.jsonl", first_load);
  const std::string once = testing::read_file(dir / "canonical.jsonl");

  const auto second_load = data::load_corpus_file(dir / "canonical.jsonl");
  data::save_corpus_file(dir / "canonical2.jsonl", second_load);
  const std::string twice = testing::read_file(dir / "canonical2.jsonl");

  EXPECT_EQ(once, twice);
  EXPECT_NE(once.find("\"relation\":\"before\""), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(Documents, UnparseableDateKeptAsSidecar) {
  const auto doc = data::document_from_json(
      json{{"doc_id", "d1"}, {"body", "正文"}, {"publish_time", "2023年7月"}});
  EXPECT_FALSE(doc.publish_time.has_value());
  ASSERT_TRUE(doc.publish_time_raw.has_value());
  EXPECT_EQ(*doc.publish_time_raw, "2023年7月");
}

TEST(Predictions, DuplicateKeyRejected) {
  const auto dir = testing::fresh_temp_dir("preds");
  data::GeneratedSummary s{"i1", "sysA", "摘要。", 0};
  testing::write_file(dir / "p.jsonl", data::serialize_summary(s) + "\n" +
                                           data::serialize_summary(s) + "\n");
  EXPECT_THROW(data::load_predictions(dir / "p.jsonl"),
               data::MalformedRecordError);
  // different shots is a distinct key
  data::GeneratedSummary s1shot = s;
  s1shot.shots = 1;
  testing::write_file(dir / "ok.jsonl", data::serialize_summary(s) + "\n" +
                                            data::serialize_summary(s1shot) + "\n");
  EXPECT_EQ(data::load_predictions(dir / "ok.jsonl").size(), 2u);
  std::filesystem::remove_all(dir);
}

TEST(Annotation, HumanReferenceWithAnnotationValidates) {
  Instance instance = make_instance("i1", 5);
  instance.reference_kind = data::ReferenceKind::human;
  instance.global_annotation = data::GlobalAnnotation{
      {"甲句。", "乙句。"},
      {{"河北", data::ArgumentRole::location, {"冀"}}},
      {{"甲句。", "乙句。", data::CausalKind::precondition}}};
  EXPECT_TRUE(data::validate(instance).empty());
  const json j = data::to_json(instance);
  const Instance back = data::instance_from_json(j);
  ASSERT_TRUE(back.global_annotation.has_value());
  EXPECT_EQ(back.global_annotation->arguments[0].corefs[0], "冀");
  EXPECT_EQ(back.global_annotation->causal[0].kind, data::CausalKind::precondition);
}

}  // namespace
}  // namespace mdseval
