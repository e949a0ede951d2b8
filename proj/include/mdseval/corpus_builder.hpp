#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mdseval/data_model.hpp"

namespace mdseval::corpus {

struct PipelineConfig {
  double similarity_threshold = 0.5;
  int min_docs = 5;
  int max_docs = 20;
  int retrieval_window_days = 31;
  int retrieval_top_k = 20;

  void validate() const;  // throws ToolkitError on bad bounds
  static PipelineConfig from_key_values(const std::map<std::string, std::string>& kv);
  static PipelineConfig from_file(const std::filesystem::path& path);
};

struct ProviderError : ToolkitError {
  using ToolkitError::ToolkitError;
};

struct EmbeddingProvider {
  virtual ~EmbeddingProvider() = default;
  virtual std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) = 0;
  virtual double similarity(const std::vector<double>& a,
                            const std::vector<double>& b) const;
  virtual std::string identity() const = 0;
};

// Deterministic local provider: character-bigram hashing into a fixed
// dimension, L2-normalized. No model weights, no network.
class HashingEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit HashingEmbeddingProvider(size_t dimension = 512);
  std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override;
  std::string identity() const override;

 private:
  size_t dimension_;
};

struct AnnotatorError : ToolkitError {
  using ToolkitError::ToolkitError;
};

struct RelationAnnotator {
  virtual ~RelationAnnotator() = default;
  virtual std::vector<data::TemporalRelation> annotate(const std::string& summary) = 0;
};

// Annotates nothing; the offline default when no LLM backend is wired in.
struct NullRelationAnnotator : RelationAnnotator {
  std::vector<data::TemporalRelation> annotate(const std::string&) override {
    return {};
  }
};

// Rule-based cleaning: markup remnants and navigation boilerplate stripped,
// whitespace collapsed, empty bodies dropped, exact duplicates (after width
// folding + whitespace collapse) merged keeping the earliest publish_time.
std::vector<data::Document> clean_documents(std::vector<data::Document> raw);

std::string clean_body(std::string_view body);

struct ScoredDocument {
  data::Document doc;
  double score = 0.0;
};

// Keeps documents with similarity(body, reference) >= threshold, original
// order preserved. Provider failures propagate.
std::vector<ScoredDocument> score_by_relevance(const std::vector<data::Document>& docs,
                                               const std::string& reference,
                                               EmbeddingProvider& provider,
                                               const PipelineConfig& config);
std::vector<data::Document> filter_by_relevance(const std::vector<data::Document>& docs,
                                                const std::string& reference,
                                                EmbeddingProvider& provider,
                                                const PipelineConfig& config);

struct MissingSimilarityScoresError : ToolkitError {
  using ToolkitError::ToolkitError;
};

enum class RejectionReason { too_few_documents };

struct AssemblyOutcome {
  std::optional<data::Instance> instance;
  std::optional<RejectionReason> rejection;

  bool ok() const { return instance.has_value(); }
};

// Wraps filtered documents into an instance. Fewer than min_docs documents
// reject the instance (a typed outcome, not an error); more than max_docs
// keep the max_docs highest-scored, which requires the scores carried from
// the filter stage.
AssemblyOutcome assemble_instance(
    const std::string& title, std::vector<data::Document> docs,
    std::string reference, const PipelineConfig& config,
    const std::optional<std::vector<double>>& scores = std::nullopt);

struct AnnotateResult {
  data::Instance instance;
  int dropped = 0;  // relations whose endpoints were not found in the reference
};

// Populates instance.temporal from the annotator: relations normalized to
// the before direction, duplicates removed, endpoints grounded in the
// reference by normalized substring match.
AnnotateResult annotate_temporal(data::Instance instance,
                                 RelationAnnotator& annotator);

struct RawReference {
  std::string url;
  std::string text;
};

// One raw ingestion record: a pre-fetched encyclopedia entry plus the news
// documents retrieved for it.
struct RawEntry {
  std::string title;
  std::map<std::string, std::string> card;
  std::string description;
  std::vector<RawReference> references;
  std::vector<data::Document> retrieved;
};

RawEntry raw_entry_from_json(const nlohmann::json& j);
std::vector<RawEntry> load_raw_entries(const std::filesystem::path& file);

// Ships the time+location presence rule; other key-field rules plug in here.
bool default_event_predicate(const RawEntry& entry);

using EventPredicate = std::function<bool(const RawEntry&)>;

struct BuildStats {
  int entries = 0;
  int skipped_non_event = 0;
  int skipped_empty_reference = 0;
  int rejected_too_few_docs = 0;
  int truncated = 0;
  int temporal_dropped = 0;
};

struct PipelineResult {
  std::vector<data::Instance> instances;
  BuildStats stats;
};

PipelineResult build_instances(const std::vector<RawEntry>& entries,
                               const PipelineConfig& config,
                               EmbeddingProvider& provider,
                               RelationAnnotator& annotator,
                               const EventPredicate& is_event = default_event_predicate);

std::string instance_id_for_title(const std::string& title);

}  // namespace mdseval::corpus
