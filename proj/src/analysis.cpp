#include "mdseval/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace mdseval::analysis {

using nlohmann::json;

namespace {

void put_optional(json& j, const char* key, const std::optional<double>& v) {
  if (v) j[key] = *v;
}

std::optional<double> get_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

json to_json(const ScoreRecord& r) {
  json j;
  j["instance_id"] = r.instance_id;
  j["system_id"] = r.system_id;
  j["shots"] = r.shots;
  j["r1"] = r.r1;
  j["r2"] = r.r2;
  j["rl"] = r.rl;
  j["semantic_f1"] = r.semantic_f1;
  put_optional(j, "er", r.er);
  put_optional(j, "ar", r.ar);
  put_optional(j, "cr", r.cr);
  put_optional(j, "tr", r.tr);
  return j;
}

ScoreRecord score_from_json(const json& j) {
  ScoreRecord r;
  r.instance_id = j.at("instance_id").get<std::string>();
  r.system_id = j.at("system_id").get<std::string>();
  r.shots = j.value("shots", 0);
  r.r1 = j.at("r1").get<double>();
  r.r2 = j.at("r2").get<double>();
  r.rl = j.at("rl").get<double>();
  r.semantic_f1 = j.at("semantic_f1").get<double>();
  r.er = get_optional(j, "er");
  r.ar = get_optional(j, "ar");
  r.cr = get_optional(j, "cr");
  r.tr = get_optional(j, "tr");
  return r;
}

std::vector<ScoreRecord> load_scores(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ToolkitError("cannot open " + file.string());
  std::vector<ScoreRecord> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(score_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw data::MalformedRecordError(line_no, e.what());
    }
  }
  return out;
}

void save_scores(const std::filesystem::path& file,
                 const std::vector<ScoreRecord>& records) {
  std::ofstream out(file, std::ios::trunc);
  if (!out) throw ToolkitError("cannot write " + file.string());
  for (const ScoreRecord& r : records) out << to_json(r).dump() << '\n';
}

namespace {

struct Accumulator {
  double sum = 0;
  int n = 0;

  void add(double v) {
    sum += v;
    ++n;
  }
  void add(const std::optional<double>& v) {
    if (v) add(*v);
  }
  std::optional<double> mean() const {
    if (n == 0) return std::nullopt;
    return sum / n;
  }
};

struct GroupStats {
  Accumulator r1, r2, rl, sf1, er, ar, cr, tr;
  int n_instances = 0;
};

ReportRow row_from_stats(const std::string& system_id, int shots,
                         const GroupStats& g) {
  ReportRow row;
  row.system_id = system_id;
  row.shots = shots;
  row.r1 = *g.r1.mean();
  row.r2 = *g.r2.mean();
  row.rl = *g.rl.mean();
  row.semantic_f1 = *g.sf1.mean();
  row.er = g.er.mean();
  row.ar = g.ar.mean();
  row.cr = g.cr.mean();
  row.tr = g.tr.mean();
  row.n_instances = g.n_instances;
  return row;
}

}  // namespace

std::vector<ReportRow> aggregate_report(const std::vector<ScoreRecord>& records) {
  std::map<std::pair<std::string, int>, GroupStats> groups;
  std::set<std::tuple<std::string, int, std::string>> seen;
  for (const ScoreRecord& r : records) {
    if (!seen.insert({r.system_id, r.shots, r.instance_id}).second)
      throw DuplicateScoreRecordError("duplicate score record (" + r.system_id +
                                      ", " + std::to_string(r.shots) + ", " +
                                      r.instance_id + ")");
    GroupStats& g = groups[{r.system_id, r.shots}];
    g.r1.add(r.r1);
    g.r2.add(r.r2);
    g.rl.add(r.rl);
    g.sf1.add(r.semantic_f1);
    g.er.add(r.er);
    g.ar.add(r.ar);
    g.cr.add(r.cr);
    g.tr.add(r.tr);
    ++g.n_instances;
  }
  std::vector<ReportRow> rows;
  rows.reserve(groups.size());
  for (const auto& [key, stats] : groups)
    rows.push_back(row_from_stats(key.first, key.second, stats));
  return rows;
}

namespace {

std::string fmt1(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

std::string fmt1(const std::optional<double>& v) {
  return v ? fmt1(*v) : std::string("-");
}

}  // namespace

std::string render_table(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  out << "system\tshots\tR-1\tR-2\tR-L\tBS\tER\tAR\tCR\tTR\tn\n";
  for (const ReportRow& row : rows) {
    out << row.system_id << '\t' << row.shots << '\t' << fmt1(row.r1) << '\t'
        << fmt1(row.r2) << '\t' << fmt1(row.rl) << '\t' << fmt1(row.semantic_f1)
        << '\t' << fmt1(row.er) << '\t' << fmt1(row.ar) << '\t' << fmt1(row.cr)
        << '\t' << fmt1(row.tr) << '\t' << row.n_instances << '\n';
  }
  return out.str();
}

size_t Bucketing::bucket_of(double value) const {
  if (edges.size() < 2) throw ToolkitError("bucketing needs at least two edges");
  if (value <= edges[1]) return 0;  // first bucket closed on both ends
  for (size_t i = 1; i + 1 < edges.size(); ++i)
    if (value <= edges[i + 1]) return i;
  return edges.size() - 2;  // clamp into the last bucket
}

std::vector<std::string> Bucketing::labels() const {
  std::vector<std::string> out;
  auto fmt = [](double v) {
    if (v == std::numeric_limits<double>::infinity()) return std::string("inf");
    std::ostringstream s;
    s << v;
    return s.str();
  };
  for (size_t i = 0; i + 1 < edges.size(); ++i) {
    const std::string open = i == 0 ? "[" : "(";
    if (edges[i + 1] == std::numeric_limits<double>::infinity())
      out.push_back("over " + fmt(edges[i]));
    else
      out.push_back(open + fmt(edges[i]) + "," + fmt(edges[i + 1]) + "]");
  }
  return out;
}

Bucketing Bucketing::default_doc_count() {
  return Bucketing{BucketDimension::doc_count, {5, 8, 12, 16, 20}};
}

Bucketing Bucketing::default_time_span() {
  return Bucketing{BucketDimension::time_span,
                   {0, 1, 7, 31, std::numeric_limits<double>::infinity()}};
}

std::optional<long> time_span_days(const data::Instance& instance) {
  const std::vector<data::Date> found =
      dates::extract_dates(instance.reference, instance.event_date);
  if (found.empty()) return std::nullopt;
  auto [min_it, max_it] = std::minmax_element(
      found.begin(), found.end(),
      [](const data::Date& a, const data::Date& b) { return a.serial() < b.serial(); });
  return dates::days_between(*min_it, *max_it);
}

BucketedReport bucket_metrics(const std::vector<ScoreRecord>& records,
                              const std::vector<data::Instance>& instances,
                              const Bucketing& bucketing) {
  BucketedReport report;
  report.dimension = bucketing.dimension;
  report.labels = bucketing.labels();

  const size_t n_buckets = bucketing.bucket_count();
  // instances with no time span land in a trailing "unknown" bucket so the
  // buckets always partition the corpus
  bool has_unknown = false;
  std::map<std::string, size_t> instance_bucket;
  std::vector<int> sizes(n_buckets + 1, 0);
  for (const data::Instance& instance : instances) {
    std::optional<double> value;
    if (bucketing.dimension == BucketDimension::doc_count) {
      value = static_cast<double>(instance.documents.size());
    } else {
      const std::optional<long> span = time_span_days(instance);
      if (span) value = static_cast<double>(*span);
    }
    size_t bucket = n_buckets;  // unknown
    if (value)
      bucket = bucketing.bucket_of(*value);
    else
      has_unknown = true;
    instance_bucket[instance.instance_id] = bucket;
    ++sizes[bucket];
  }
  if (has_unknown) report.labels.push_back("unknown");
  report.sizes.assign(sizes.begin(),
                      sizes.begin() + (has_unknown ? n_buckets + 1 : n_buckets));

  std::map<std::tuple<std::string, int, size_t>, GroupStats> groups;
  for (const ScoreRecord& r : records) {
    auto it = instance_bucket.find(r.instance_id);
    if (it == instance_bucket.end()) continue;
    GroupStats& g = groups[{r.system_id, r.shots, it->second}];
    g.r1.add(r.r1);
    g.r2.add(r.r2);
    g.rl.add(r.rl);
    g.sf1.add(r.semantic_f1);
    g.er.add(r.er);
    g.ar.add(r.ar);
    g.cr.add(r.cr);
    g.tr.add(r.tr);
    ++g.n_instances;
  }

  std::set<std::pair<std::string, int>> systems;
  for (const ScoreRecord& r : records) systems.insert({r.system_id, r.shots});
  for (const auto& [system_id, shots] : systems) {
    for (size_t b = 0; b < report.labels.size(); ++b) {
      BucketRow row;
      row.label = report.labels[b];
      row.size = report.sizes[b];
      row.system_id = system_id;
      row.shots = shots;
      auto it = groups.find({system_id, shots, b});
      if (it != groups.end())
        row.metrics = row_from_stats(system_id, shots, it->second);
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

json BucketedReport::plot_data() const {
  json j;
  j["dimension"] =
      dimension == BucketDimension::doc_count ? "doc_count" : "time_span";
  j["buckets"] = labels;
  j["sizes"] = sizes;
  j["series"] = json::array();

  auto metric_series = [&](const std::string& system_id, int shots,
                           const char* name, auto getter) {
    json series;
    series["system_id"] = system_id;
    series["shots"] = shots;
    series["metric"] = name;
    json values = json::array();
    for (const BucketRow& row : rows) {
      if (row.system_id != system_id || row.shots != shots) continue;
      if (!row.metrics) {
        values.push_back(nullptr);
        continue;
      }
      const auto v = getter(*row.metrics);
      if (v)
        values.push_back(*v);
      else
        values.push_back(nullptr);
    }
    series["values"] = values;
    return series;
  };

  std::set<std::pair<std::string, int>> systems;
  for (const BucketRow& row : rows) systems.insert({row.system_id, row.shots});
  using Getter = std::function<std::optional<double>(const ReportRow&)>;
  const std::vector<std::pair<const char*, Getter>> metrics = {
      {"r1", [](const ReportRow& r) { return std::optional<double>(r.r1); }},
      {"r2", [](const ReportRow& r) { return std::optional<double>(r.r2); }},
      {"rl", [](const ReportRow& r) { return std::optional<double>(r.rl); }},
      {"semantic_f1",
       [](const ReportRow& r) { return std::optional<double>(r.semantic_f1); }},
      {"er", [](const ReportRow& r) { return r.er; }},
      {"ar", [](const ReportRow& r) { return r.ar; }},
      {"cr", [](const ReportRow& r) { return r.cr; }},
      {"tr", [](const ReportRow& r) { return r.tr; }},
  };
  for (const auto& [system_id, shots] : systems)
    for (const auto& [name, getter] : metrics)
      j["series"].push_back(metric_series(system_id, shots, name, getter));
  return j;
}

double consistency(const std::vector<int>& predicted,
                   const std::vector<int>& human) {
  if (predicted.size() != human.size())
    throw LengthMismatchError("verdict vectors differ in length: " +
                              std::to_string(predicted.size()) + " vs " +
                              std::to_string(human.size()));
  if (predicted.empty()) throw EmptyInputError("empty verdict vectors");
  for (size_t i = 0; i < predicted.size(); ++i)
    if ((predicted[i] != 0 && predicted[i] != 1) ||
        (human[i] != 0 && human[i] != 1))
      throw ToolkitError("verdicts must be binary");
  long agree = 0;
  for (size_t i = 0; i < predicted.size(); ++i)
    if (predicted[i] == human[i]) ++agree;
  return 100.0 * static_cast<double>(agree) / static_cast<double>(predicted.size());
}

}  // namespace mdseval::analysis
