#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mdseval/data_model.hpp"

namespace mdseval::analysis {

// Per-instance metric record produced by `evaluate`. Values are percents in
// [0,100]; recall kinds absent when the instance has no such annotations.
struct ScoreRecord {
  std::string instance_id;
  std::string system_id;
  int shots = 0;
  double r1 = 0, r2 = 0, rl = 0, semantic_f1 = 0;
  std::optional<double> er, ar, cr, tr;
};

nlohmann::json to_json(const ScoreRecord&);
ScoreRecord score_from_json(const nlohmann::json&);
std::vector<ScoreRecord> load_scores(const std::filesystem::path& file);
void save_scores(const std::filesystem::path& file,
                 const std::vector<ScoreRecord>& records);

struct ReportRow {
  std::string system_id;
  int shots = 0;
  double r1 = 0, r2 = 0, rl = 0, semantic_f1 = 0;
  std::optional<double> er, ar, cr, tr;
  int n_instances = 0;
};

struct DuplicateScoreRecordError : ToolkitError {
  using ToolkitError::ToolkitError;
};

// Macro-average per (system_id, shots); recall kinds average only over the
// instances where the kind is present.
std::vector<ReportRow> aggregate_report(const std::vector<ScoreRecord>& records);

// Tab-separated table, header matching the report columns, one decimal.
std::string render_table(const std::vector<ReportRow>& rows);

enum class BucketDimension { doc_count, time_span };

struct Bucketing {
  BucketDimension dimension = BucketDimension::doc_count;
  // edges e0..ek define buckets [e0,e1], (e1,e2], ..., (e_{k-1},ek];
  // values outside clamp into the end buckets.
  std::vector<double> edges;

  size_t bucket_count() const { return edges.size() - 1; }
  size_t bucket_of(double value) const;
  std::vector<std::string> labels() const;

  static Bucketing default_doc_count();   // [5,8], (8,12], (12,16], (16,20]
  static Bucketing default_time_span();   // days: [0,1], (1,7], (7,31], (31,inf)
};

struct BucketRow {
  std::string label;
  int size = 0;  // instances in the bucket (with or without scores)
  std::string system_id;
  int shots = 0;
  std::optional<ReportRow> metrics;  // absent for empty buckets
};

struct BucketedReport {
  BucketDimension dimension;
  std::vector<std::string> labels;
  std::vector<int> sizes;  // instance counts per bucket (+ trailing "unknown"
                           // bucket for time_span when dates are missing)
  std::vector<BucketRow> rows;

  nlohmann::json plot_data() const;
};

BucketedReport bucket_metrics(const std::vector<ScoreRecord>& records,
                              const std::vector<data::Instance>& instances,
                              const Bucketing& bucketing);

// Event time span in days: max minus min of the dates extracted from the
// reference summary (relative expressions resolved against event_date).
// One date gives 0, no date gives absent.
std::optional<long> time_span_days(const data::Instance& instance);

struct LengthMismatchError : ToolkitError {
  using ToolkitError::ToolkitError;
};
struct EmptyInputError : ToolkitError {
  using ToolkitError::ToolkitError;
};

// Per-element agreement rate between two aligned binary verdict vectors,
// as a percent.
double consistency(const std::vector<int>& predicted,
                   const std::vector<int>& human);

}  // namespace mdseval::analysis
