#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mdseval/dates.hpp"

namespace mdseval {

// Base class for every typed failure raised by the toolkit. The CLI maps
// these to exit code 1.
struct ToolkitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mdseval

namespace mdseval::data {

using dates::Date;

enum class ReferenceKind { auto_built, human };
enum class ArgumentRole { time, location, person, organization };
enum class CausalKind { cause, precondition };
enum class Split { train, dev, test };
enum class TemporalOrder { before, after };

std::string to_string(ReferenceKind k);
std::string to_string(ArgumentRole r);
std::string to_string(CausalKind k);
std::string to_string(Split s);

// Throws UnknownSplitError for anything but train/dev/test.
Split parse_split(std::string_view name);
std::string split_filename(Split s);

struct Document {
  std::string doc_id;
  std::string source;
  std::string title;
  std::optional<Date> publish_time;
  // Raw date string kept when the original value did not parse as ISO-8601.
  std::optional<std::string> publish_time_raw;
  std::string body;
};

// Stored normalized: `earlier` precedes `later`. Constructing with
// TemporalOrder::after swaps the endpoints.
struct TemporalRelation {
  std::string earlier;
  std::string later;

  TemporalRelation() = default;
  TemporalRelation(std::string first, std::string second,
                   TemporalOrder order = TemporalOrder::before);

  bool operator==(const TemporalRelation&) const = default;
};

struct Argument {
  std::string text;
  ArgumentRole role = ArgumentRole::time;
  std::vector<std::string> corefs;
};

struct CausalRelation {
  std::string cause_sentence;
  std::string effect_sentence;
  CausalKind kind = CausalKind::cause;
};

struct GlobalAnnotation {
  std::vector<std::string> sub_events;
  std::vector<Argument> arguments;
  std::vector<CausalRelation> causal;
};

struct Instance {
  std::string instance_id;
  std::string event_title;
  std::vector<Document> documents;
  std::string reference;
  ReferenceKind reference_kind = ReferenceKind::auto_built;
  std::vector<TemporalRelation> temporal;
  std::optional<GlobalAnnotation> global_annotation;
  std::optional<Date> event_date;
  // Opaque basic-information card; only the time field feeds event_date.
  std::map<std::string, std::string> card;
};

struct GeneratedSummary {
  std::string instance_id;
  std::string system_id;
  std::string text;
  int shots = 0;
};

enum class ValidationCode {
  document_count_out_of_range,
  empty_reference,
  dangling_causal_endpoint,
  empty_document_body,
  duplicate_doc_id,
  duplicate_sub_event,
  temporal_self_relation,
  causal_self_relation,
  annotation_requires_human_reference,
  empty_argument_text,
  coref_duplicates_argument,
};

std::string to_string(ValidationCode code);

struct ValidationIssue {
  ValidationCode code;
  std::string detail;
};

struct ValidationError : ToolkitError {
  ValidationError(std::string msg, std::vector<ValidationIssue> iss)
      : ToolkitError(std::move(msg)), issues(std::move(iss)) {}
  std::vector<ValidationIssue> issues;
};

struct MalformedRecordError : ToolkitError {
  MalformedRecordError(size_t line, const std::string& reason);
  size_t line_number;
};

struct UnknownSplitError : ToolkitError {
  using ToolkitError::ToolkitError;
};

// Collects every violated invariant (never stops at the first).
std::vector<ValidationIssue> validate(const Instance& candidate,
                                      int min_docs = 5, int max_docs = 20);

// Returns the instance iff it is valid; otherwise throws ValidationError
// listing all violations.
Instance validate_instance(Instance candidate, int min_docs = 5,
                           int max_docs = 20);

nlohmann::json to_json(const Document&);
nlohmann::json to_json(const TemporalRelation&);
nlohmann::json to_json(const Argument&);
nlohmann::json to_json(const CausalRelation&);
nlohmann::json to_json(const GlobalAnnotation&);
nlohmann::json to_json(const Instance&);
nlohmann::json to_json(const GeneratedSummary&);

Document document_from_json(const nlohmann::json&);
TemporalRelation temporal_from_json(const nlohmann::json&);
Argument argument_from_json(const nlohmann::json&);
CausalRelation causal_from_json(const nlohmann::json&);
GlobalAnnotation annotation_from_json(const nlohmann::json&);
Instance instance_from_json(const nlohmann::json&);
GeneratedSummary summary_from_json(const nlohmann::json&);

// Canonical single-line serialization (sorted keys, no whitespace).
std::string serialize_instance(const Instance&);

// Loads <path>/<split>.jsonl; every record is validated and file order is
// preserved. Parse or validation failures raise MalformedRecordError with
// the 1-based line number.
std::vector<Instance> load_corpus(const std::filesystem::path& dir, Split split);
std::vector<Instance> load_corpus_file(const std::filesystem::path& file);
void save_corpus_file(const std::filesystem::path& file,
                      const std::vector<Instance>& instances);

// Predictions are JSONL of GeneratedSummary records. Loading rejects
// duplicate (instance_id, system_id, shots) keys.
std::vector<GeneratedSummary> load_predictions(const std::filesystem::path& file);
void save_predictions(const std::filesystem::path& file,
                      const std::vector<GeneratedSummary>& summaries);
std::string serialize_summary(const GeneratedSummary&);

}  // namespace mdseval::data
