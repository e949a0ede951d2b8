#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mdseval/data_model.hpp"

namespace mdseval::harness {

struct GenerationParams {
  double temperature = 0.01;
  int max_output_length = 0;  // 0 = uncapped
  std::optional<uint64_t> seed;
};

struct BackendError : ToolkitError {
  using ToolkitError::ToolkitError;
};

struct GenerationBackend {
  virtual ~GenerationBackend() = default;
  virtual std::string generate(const std::string& prompt,
                               const GenerationParams& params) = 0;
  // Declared input budget in characters (code points).
  virtual long context_limit() const = 0;
  virtual std::string identity() const = 0;
};

// Stub backend: returns the prompt itself (capped to max_output_length
// characters when set). Used for smoke tests and determinism checks.
class EchoBackend : public GenerationBackend {
 public:
  explicit EchoBackend(long context_limit = 1000000);
  std::string generate(const std::string& prompt,
                       const GenerationParams& params) override;
  long context_limit() const override { return context_limit_; }
  std::string identity() const override { return "echo"; }

 private:
  long context_limit_;
};

struct PromptTemplate {
  std::string preamble;
  std::string doc_delimiter = "\n";
  // Placeholders {documents} and {summary} expand per demonstration.
  std::string demonstration_block;

  std::string hash() const;
  static PromptTemplate default_chinese();
  static PromptTemplate from_file(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

struct ContextOverflowError : ToolkitError {
  ContextOverflowError(const std::string& instance_id, size_t prompt_chars,
                       long limit);
  std::string instance_id;
};

// Demonstration: a training-split instance shown with its reference summary.
struct Demonstration {
  const data::Instance* instance;
  std::string summary;
};

std::string render_documents(const data::Instance& instance,
                             const std::string& delimiter);

// preamble + k demonstration blocks + the indexed target documents.
// Throws ContextOverflowError when context_limit is set and the rendered
// prompt exceeds it.
std::string build_prompt(const data::Instance& instance,
                         const std::vector<Demonstration>& demonstrations,
                         const PromptTemplate& tmpl,
                         std::optional<long> context_limit = std::nullopt);

// Seeded uniform sample without replacement from the training split.
std::vector<Demonstration> sample_demonstrations(
    const std::vector<data::Instance>& train, int shots, uint64_t seed);

// Tail-truncates the longest documents first until the rendered prompt fits
// the limit. Throws ContextOverflowError when even empty documents overflow.
std::string build_prompt_truncated(data::Instance instance,
                                   const std::vector<Demonstration>& demonstrations,
                                   const PromptTemplate& tmpl, long context_limit);

struct RunOptions {
  std::string system_id;
  int shots = 0;
  uint64_t seed = 0;
  int jobs = 1;
  int max_retries = 2;
  double abort_skip_rate = 0.5;
  // default is skip-on-overflow; truncation is opt-in
  bool truncate_on_overflow = false;
};

struct SkipRecord {
  std::string instance_id;
  std::string reason;
};

struct RunManifest {
  std::string system_id;
  int shots = 0;
  std::string backend;
  GenerationParams params;
  std::string template_hash;
  long completed = 0;
  std::vector<SkipRecord> skips;

  nlohmann::json to_json() const;
  void save(const std::filesystem::path& file) const;
};

struct BatchAbortedError : ToolkitError {
  using ToolkitError::ToolkitError;
};

struct RunResult {
  std::vector<data::GeneratedSummary> summaries;
  RunManifest manifest;
};

// Generates one summary per target, appending each to out_file as soon as
// it completes. Re-running resumes: targets whose (instance_id, system_id,
// shots) key is already persisted are not regenerated. Oversized prompts
// and backend failures (after bounded retries) skip with a record; the run
// aborts once the skip rate passes options.abort_skip_rate.
RunResult run_batch(const std::vector<data::Instance>& targets,
                    GenerationBackend& backend, const GenerationParams& params,
                    const PromptTemplate& tmpl,
                    const std::vector<Demonstration>& demonstrations,
                    const RunOptions& options,
                    const std::filesystem::path& out_file);

}  // namespace mdseval::harness
