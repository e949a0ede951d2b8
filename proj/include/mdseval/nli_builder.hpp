#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mdseval/corpus_builder.hpp"
#include "mdseval/data_model.hpp"
#include "mdseval/recall_metrics.hpp"

namespace mdseval::nli {

enum class Strategy { positive, remove, revise, replace };

std::string to_string(Strategy s);
Strategy strategy_from_string(std::string_view s);

struct NliPair {
  std::string t1;
  std::string t2;
  int label = 1;  // 1 iff strategy == positive
  recall::ElementKind kind = recall::ElementKind::event;
  Strategy strategy = Strategy::positive;
  std::string source_id;
};

nlohmann::json to_json(const NliPair&);
NliPair pair_from_json(const nlohmann::json&);

// One structured source record: the input text that becomes t1 plus the
// annotated element matching the kind.
struct NliSource {
  std::string source_id;
  recall::ElementKind kind = recall::ElementKind::event;
  std::string text;
  std::map<std::string, std::string> event_fields;  // kind == event
  std::optional<data::Argument> argument;           // kind == argument
  std::optional<data::CausalRelation> causal;       // kind == causal
  std::optional<data::TemporalRelation> temporal;   // kind == temporal
  std::vector<std::string> anchors;  // explicit anchor keys (optional)
};

NliSource source_from_json(const nlohmann::json&);
std::vector<NliSource> load_sources(const std::filesystem::path& file);

// Anchor keys used by the replace-eligibility rule: explicit anchors when
// given, otherwise the trigger/time fields (events), the argument surface
// form, or the relation endpoints. Keys are match-normalized.
std::vector<std::string> anchor_keys(const NliSource& source);

struct NliBuildError : ToolkitError {
  using ToolkitError::ToolkitError;
};
struct RephraserError : NliBuildError {
  using NliBuildError::NliBuildError;
};
struct IdenticalRevisionError : NliBuildError {
  using NliBuildError::NliBuildError;
};
struct DegenerateRemovalError : NliBuildError {
  using NliBuildError::NliBuildError;
};
struct EmptyRemovalError : NliBuildError {
  using NliBuildError::NliBuildError;
};
struct NoEligibleReplacementError : NliBuildError {
  using NliBuildError::NliBuildError;
};

struct Rephraser {
  virtual ~Rephraser() = default;
  virtual std::string to_sentence(const NliSource& record) = 0;
  virtual std::string revise(const std::string& sentence) = 0;
  virtual std::string identity() const = 0;
};

// Deterministic offline rephraser. to_sentence joins structured fields (or
// applies the relation templates); revise bumps the first digit, falling
// back to appending a detail clause when the sentence carries no number.
class TemplateRephraser : public Rephraser {
 public:
  std::string to_sentence(const NliSource& record) override;
  std::string revise(const std::string& sentence) override;
  std::string identity() const override { return "template"; }
};

// Positive pair construction. Coref arguments rewrite t1 so that every
// occurrence of the argument except the first becomes the chosen coref
// mention, which then serves as t2.
NliPair make_positive(const NliSource& record, Rephraser& rephraser,
                      int max_retries = 3);

// Remove strategy: sentences of t1 with similarity to t2 strictly above the
// threshold are dropped; the remainder concatenates into t1'.
NliPair negative_remove(const NliPair& pair, corpus::EmbeddingProvider& provider,
                        double threshold = 0.5);

// Revise strategy: t2 is mutated; identical output is retried up to the
// bound and then rejected.
NliPair negative_revise(const NliPair& pair, Rephraser& rephraser,
                        int max_retries = 3);

// Replace strategy: t1' becomes the pool text most similar to t2 among
// candidates that share no anchor with the origin record.
NliPair negative_replace(const NliPair& pair, const NliSource& origin,
                         const std::vector<NliSource>& pool,
                         corpus::EmbeddingProvider& provider);

struct BuildPlan {
  double negative_fraction = 0.5;
  std::map<Strategy, double> strategy_mix = {{Strategy::remove, 1.0 / 3},
                                             {Strategy::revise, 1.0 / 3},
                                             {Strategy::replace, 1.0 / 3}};
  int replace_pool_size = 100;
  double remove_threshold = 0.5;
  std::array<double, 3> split_fractions = {0.8, 0.1, 0.1};  // train/dev/test
  std::optional<std::array<long, 3>> split_caps;

  void validate() const;
  static BuildPlan from_file(const std::filesystem::path& path);
};

struct Manifest {
  // kind -> split -> strategy -> count
  std::map<std::string, std::map<std::string, std::map<std::string, long>>> counts;
  // kind -> declared train/dev/test sizes (metadata from an external build)
  std::map<std::string, std::array<long, 3>> declared_sizes;
  long skipped = 0;
  uint64_t seed = 0;

  nlohmann::json to_json() const;
  static Manifest from_json(const nlohmann::json&);
  static Manifest load(const std::filesystem::path& file);
  void save(const std::filesystem::path& file) const;
};

struct DatasetBuild {
  std::array<std::vector<NliPair>, 3> splits;  // train/dev/test
  Manifest manifest;
};

struct BuildFailedError : NliBuildError {
  using NliBuildError::NliBuildError;
};

// Builds positives for every source, converts a seeded negative_fraction
// share via the strategy mix, and partitions by source_id so one source
// never crosses splits. Per-pair failures skip with a count; the build
// fails when more than 20% of pairs skip.
DatasetBuild build_dataset(const std::vector<NliSource>& sources,
                           const BuildPlan& plan, Rephraser& rephraser,
                           corpus::EmbeddingProvider& provider, uint64_t seed);

data::Split split_of_source(const std::string& source_id,
                            const std::array<double, 3>& fractions);

// Writes {kind}.{split}.jsonl files plus manifest.json under dir.
void write_dataset(const std::filesystem::path& dir, const DatasetBuild& build);

}  // namespace mdseval::nli
