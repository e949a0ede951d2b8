#include "mdseval/corpus_builder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <regex>
#include <set>

#include <nlohmann/json.hpp>

#include "mdseval/config.hpp"
#include "mdseval/metrics.hpp"
#include "mdseval/text.hpp"

namespace mdseval::corpus {

using nlohmann::json;

void PipelineConfig::validate() const {
  if (similarity_threshold < 0.0 || similarity_threshold > 1.0)
    throw ToolkitError("similarity_threshold must lie in [0,1]");
  if (min_docs < 1 || min_docs > max_docs)
    throw ToolkitError("document bounds must satisfy 1 <= min_docs <= max_docs");
  if (retrieval_top_k < 1) throw ToolkitError("retrieval_top_k must be >= 1");
  if (retrieval_window_days < 1)
    throw ToolkitError("retrieval_window_days must be >= 1");
}

PipelineConfig PipelineConfig::from_key_values(
    const std::map<std::string, std::string>& kv) {
  PipelineConfig cfg;
  for (const auto& [key, value] : kv) {
    if (key == "similarity_threshold")
      cfg.similarity_threshold = std::stod(value);
    else if (key == "min_docs")
      cfg.min_docs = std::stoi(value);
    else if (key == "max_docs")
      cfg.max_docs = std::stoi(value);
    else if (key == "retrieval_window_days")
      cfg.retrieval_window_days = std::stoi(value);
    else if (key == "retrieval_top_k")
      cfg.retrieval_top_k = std::stoi(value);
    else
      throw ToolkitError("unknown pipeline config key: " + key);
  }
  cfg.validate();
  return cfg;
}

PipelineConfig PipelineConfig::from_file(const std::filesystem::path& path) {
  return from_key_values(cli::parse_key_value_file(path));
}

double EmbeddingProvider::similarity(const std::vector<double>& a,
                                     const std::vector<double>& b) const {
  return metrics::cosine(a, b);
}

HashingEmbeddingProvider::HashingEmbeddingProvider(size_t dimension)
    : dimension_(dimension) {}

std::vector<std::vector<double>> HashingEmbeddingProvider::embed(
    const std::vector<std::string>& texts) {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const std::string& raw : texts) {
    std::vector<double> v(dimension_, 0.0);
    const std::vector<std::string> chars =
        text::char_tokens(text::normalize_for_match(raw));
    for (size_t i = 0; i + 1 < chars.size(); ++i) {
      uint64_t h = 0xcbf29ce484222325ULL;
      for (unsigned char b : chars[i]) h = (h ^ b) * 0x100000001b3ULL;
      for (unsigned char b : chars[i + 1]) h = (h ^ b) * 0x100000001b3ULL;
      v[h % dimension_] += 1.0;
    }
    double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    if (norm > 0.0)
      for (double& x : v) x /= norm;
    out.push_back(std::move(v));
  }
  return out;
}

std::string HashingEmbeddingProvider::identity() const {
  return "hashing-bigram-" + std::to_string(dimension_);
}

namespace {

const std::vector<std::regex>& boilerplate_rules() {
  static const std::vector<std::regex> kRules = {
      std::regex("<[^<>]{0,256}>"),                       // markup remnants
      std::regex("&(nbsp|ensp|emsp|thinsp|zwnj|zwj);"),   // spacing entities
      std::regex("(责任编辑|本文来源|点击进入专题|返回首页|返回顶部|打印本页|"
                 "扫码关注|分享到|相关阅读|相关新闻)[：:]?[^\\s。]*"),
      std::regex("【字体[：:][^】]*】"),
  };
  return kRules;
}

}  // namespace

std::string clean_body(std::string_view body) {
  std::string s(body);
  for (const std::regex& rule : boilerplate_rules())
    s = std::regex_replace(s, rule, " ");
  s = std::regex_replace(s, std::regex("&amp;"), "&");
  s = std::regex_replace(s, std::regex("&lt;"), "<");
  s = std::regex_replace(s, std::regex("&gt;"), ">");
  s = std::regex_replace(s, std::regex("&quot;"), "\"");
  return text::collapse_whitespace(s);
}

std::vector<data::Document> clean_documents(std::vector<data::Document> raw) {
  std::vector<data::Document> cleaned;
  cleaned.reserve(raw.size());
  for (data::Document& doc : raw) {
    doc.body = clean_body(doc.body);
    if (doc.body.empty()) continue;
    cleaned.push_back(std::move(doc));
  }

  // exact-duplicate bodies merge into the earliest-dated copy
  std::map<std::string, size_t> first_position;
  std::vector<data::Document> out;
  for (data::Document& doc : cleaned) {
    const std::string key = text::normalize_for_dedup(doc.body);
    auto it = first_position.find(key);
    if (it == first_position.end()) {
      first_position.emplace(key, out.size());
      out.push_back(std::move(doc));
      continue;
    }
    data::Document& kept = out[it->second];
    const bool incoming_dated = doc.publish_time.has_value();
    const bool kept_dated = kept.publish_time.has_value();
    if (incoming_dated && (!kept_dated || *doc.publish_time < *kept.publish_time))
      kept = std::move(doc);
  }
  return out;
}

std::vector<ScoredDocument> score_by_relevance(
    const std::vector<data::Document>& docs, const std::string& reference,
    EmbeddingProvider& provider, const PipelineConfig& config) {
  if (docs.empty()) return {};
  std::vector<std::string> texts;
  texts.reserve(docs.size() + 1);
  texts.push_back(reference);
  for (const data::Document& doc : docs) texts.push_back(doc.body);

  const std::vector<std::vector<double>> vectors = provider.embed(texts);
  if (vectors.size() != texts.size())
    throw ProviderError("embedding provider returned " +
                        std::to_string(vectors.size()) + " vectors for " +
                        std::to_string(texts.size()) + " texts");

  std::vector<ScoredDocument> kept;
  for (size_t i = 0; i < docs.size(); ++i) {
    const double score = provider.similarity(vectors[i + 1], vectors[0]);
    if (score >= config.similarity_threshold) kept.push_back({docs[i], score});
  }
  return kept;
}

std::vector<data::Document> filter_by_relevance(
    const std::vector<data::Document>& docs, const std::string& reference,
    EmbeddingProvider& provider, const PipelineConfig& config) {
  std::vector<data::Document> out;
  for (ScoredDocument& scored : score_by_relevance(docs, reference, provider, config))
    out.push_back(std::move(scored.doc));
  return out;
}

std::string instance_id_for_title(const std::string& title) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char b : title) h = (h ^ b) * 0x100000001b3ULL;
  char buf[20];
  std::snprintf(buf, sizeof(buf), "ev-%012llx",
                static_cast<unsigned long long>(h & 0xFFFFFFFFFFFFULL));
  return buf;
}

AssemblyOutcome assemble_instance(const std::string& title,
                                  std::vector<data::Document> docs,
                                  std::string reference,
                                  const PipelineConfig& config,
                                  const std::optional<std::vector<double>>& scores) {
  AssemblyOutcome outcome;
  if (static_cast<int>(docs.size()) < config.min_docs) {
    outcome.rejection = RejectionReason::too_few_documents;
    return outcome;
  }
  if (static_cast<int>(docs.size()) > config.max_docs) {
    if (!scores || scores->size() != docs.size())
      throw MissingSimilarityScoresError(
          "truncation to max_docs requires one similarity score per document");
    // keep the max_docs highest-scored documents, original order preserved
    std::vector<size_t> order(docs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      return (*scores)[a] > (*scores)[b];
    });
    order.resize(config.max_docs);
    std::sort(order.begin(), order.end());
    std::vector<data::Document> kept;
    kept.reserve(order.size());
    for (size_t idx : order) kept.push_back(std::move(docs[idx]));
    docs = std::move(kept);
  }

  data::Instance instance;
  instance.instance_id = instance_id_for_title(title);
  instance.event_title = title;
  instance.documents = std::move(docs);
  instance.reference = std::move(reference);
  instance.reference_kind = data::ReferenceKind::auto_built;
  outcome.instance = std::move(instance);
  return outcome;
}

AnnotateResult annotate_temporal(data::Instance instance,
                                 RelationAnnotator& annotator) {
  std::vector<data::TemporalRelation> raw = annotator.annotate(instance.reference);

  AnnotateResult result;
  std::set<std::pair<std::string, std::string>> seen;
  std::vector<data::TemporalRelation> kept;
  for (data::TemporalRelation& rel : raw) {
    if (!seen.insert({rel.earlier, rel.later}).second) continue;
    const bool grounded =
        text::contains_normalized(instance.reference, rel.earlier) &&
        text::contains_normalized(instance.reference, rel.later);
    if (!grounded) {
      ++result.dropped;
      continue;
    }
    kept.push_back(std::move(rel));
  }
  instance.temporal = std::move(kept);
  result.instance = std::move(instance);
  return result;
}

RawEntry raw_entry_from_json(const json& j) {
  RawEntry entry;
  entry.title = j.at("title").get<std::string>();
  if (j.contains("card"))
    entry.card = j.at("card").get<std::map<std::string, std::string>>();
  entry.description = j.value("description", "");
  if (j.contains("references"))
    for (const json& r : j.at("references"))
      entry.references.push_back(
          {r.value("url", ""), r.at("text").get<std::string>()});
  if (j.contains("retrieved"))
    for (const json& d : j.at("retrieved"))
      entry.retrieved.push_back(data::document_from_json(d));
  return entry;
}

std::vector<RawEntry> load_raw_entries(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ToolkitError("cannot open " + file.string());
  std::vector<RawEntry> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(raw_entry_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw data::MalformedRecordError(line_no, e.what());
    }
  }
  return out;
}

bool default_event_predicate(const RawEntry& entry) {
  auto has = [&](const char* key) {
    auto it = entry.card.find(key);
    return it != entry.card.end() && !it->second.empty();
  };
  return has("time") && has("location");
}

PipelineResult build_instances(const std::vector<RawEntry>& entries,
                               const PipelineConfig& config,
                               EmbeddingProvider& provider,
                               RelationAnnotator& annotator,
                               const EventPredicate& is_event) {
  config.validate();
  PipelineResult result;
  for (const RawEntry& entry : entries) {
    ++result.stats.entries;
    if (!is_event(entry)) {
      ++result.stats.skipped_non_event;
      continue;
    }
    if (entry.description.empty()) {
      ++result.stats.skipped_empty_reference;
      continue;
    }

    std::optional<data::Date> event_date;
    if (auto time_it = entry.card.find("time"); time_it != entry.card.end()) {
      event_date = data::Date::parse_iso(time_it->second);
      if (!event_date) {
        const auto extracted = dates::extract_dates(time_it->second);
        if (!extracted.empty()) event_date = extracted.front();
      }
    }

    std::vector<data::Document> docs;
    for (size_t i = 0; i < entry.references.size(); ++i) {
      data::Document d;
      d.doc_id = "ref-" + std::to_string(i + 1);
      d.source = entry.references[i].url;
      d.title = entry.title;
      d.body = entry.references[i].text;
      docs.push_back(std::move(d));
    }
    // retrieved docs honor the retrieval window around the event date and
    // the top-k cap; cited references always stay
    int retrieved_kept = 0;
    for (const data::Document& d : entry.retrieved) {
      if (retrieved_kept >= config.retrieval_top_k) break;
      if (event_date && d.publish_time &&
          std::abs(dates::days_between(*event_date, *d.publish_time)) >
              config.retrieval_window_days)
        continue;
      docs.push_back(d);
      ++retrieved_kept;
    }

    docs = clean_documents(std::move(docs));
    std::vector<ScoredDocument> scored =
        score_by_relevance(docs, entry.description, provider, config);

    std::vector<data::Document> kept;
    std::vector<double> scores;
    for (ScoredDocument& s : scored) {
      kept.push_back(std::move(s.doc));
      scores.push_back(s.score);
    }
    if (static_cast<int>(kept.size()) > config.max_docs) ++result.stats.truncated;

    AssemblyOutcome outcome = assemble_instance(entry.title, std::move(kept),
                                                entry.description, config, scores);
    if (!outcome.ok()) {
      ++result.stats.rejected_too_few_docs;
      continue;
    }

    data::Instance instance = std::move(*outcome.instance);
    instance.card = entry.card;
    instance.event_date = event_date;

    AnnotateResult annotated = annotate_temporal(std::move(instance), annotator);
    result.stats.temporal_dropped += annotated.dropped;
    result.instances.push_back(data::validate_instance(
        std::move(annotated.instance), config.min_docs, config.max_docs));
  }
  return result;
}

}  // namespace mdseval::corpus
