#include "mdseval/data_model.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace mdseval::data {

using nlohmann::json;

std::string to_string(ReferenceKind k) {
  return k == ReferenceKind::human ? "human" : "auto";
}

std::string to_string(ArgumentRole r) {
  switch (r) {
    case ArgumentRole::time: return "time";
    case ArgumentRole::location: return "location";
    case ArgumentRole::person: return "person";
    case ArgumentRole::organization: return "organization";
  }
  return "time";
}

std::string to_string(CausalKind k) {
  return k == CausalKind::precondition ? "precondition" : "cause";
}

std::string to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    case Split::test: return "test";
  }
  return "train";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::train;
  if (name == "dev") return Split::dev;
  if (name == "test") return Split::test;
  throw UnknownSplitError("unknown split: " + std::string(name));
}

std::string split_filename(Split s) { return to_string(s) + ".jsonl"; }

TemporalRelation::TemporalRelation(std::string first, std::string second,
                                   TemporalOrder order) {
  if (order == TemporalOrder::after) {
    earlier = std::move(second);
    later = std::move(first);
  } else {
    earlier = std::move(first);
    later = std::move(second);
  }
}

MalformedRecordError::MalformedRecordError(size_t line, const std::string& reason)
    : ToolkitError("malformed record at line " + std::to_string(line) + ": " +
                   reason),
      line_number(line) {}

std::string to_string(ValidationCode code) {
  switch (code) {
    case ValidationCode::document_count_out_of_range:
      return "DocumentCountOutOfRange";
    case ValidationCode::empty_reference: return "EmptyReference";
    case ValidationCode::dangling_causal_endpoint:
      return "DanglingCausalEndpoint";
    case ValidationCode::empty_document_body: return "EmptyDocumentBody";
    case ValidationCode::duplicate_doc_id: return "DuplicateDocId";
    case ValidationCode::duplicate_sub_event: return "DuplicateSubEvent";
    case ValidationCode::temporal_self_relation: return "TemporalSelfRelation";
    case ValidationCode::causal_self_relation: return "CausalSelfRelation";
    case ValidationCode::annotation_requires_human_reference:
      return "AnnotationRequiresHumanReference";
    case ValidationCode::empty_argument_text: return "EmptyArgumentText";
    case ValidationCode::coref_duplicates_argument:
      return "CorefDuplicatesArgument";
  }
  return "Unknown";
}

std::vector<ValidationIssue> validate(const Instance& candidate, int min_docs,
                                      int max_docs) {
  std::vector<ValidationIssue> issues;
  auto add = [&](ValidationCode code, std::string detail) {
    issues.push_back({code, std::move(detail)});
  };

  const int n_docs = static_cast<int>(candidate.documents.size());
  if (n_docs < min_docs || n_docs > max_docs)
    add(ValidationCode::document_count_out_of_range,
        "instance has " + std::to_string(n_docs) + " documents, allowed [" +
            std::to_string(min_docs) + "," + std::to_string(max_docs) + "]");

  if (candidate.reference.empty())
    add(ValidationCode::empty_reference, "reference summary is empty");

  std::unordered_set<std::string> doc_ids;
  for (const Document& doc : candidate.documents) {
    if (doc.body.empty())
      add(ValidationCode::empty_document_body, "document " + doc.doc_id);
    if (!doc_ids.insert(doc.doc_id).second)
      add(ValidationCode::duplicate_doc_id, doc.doc_id);
  }

  for (const TemporalRelation& rel : candidate.temporal)
    if (rel.earlier == rel.later)
      add(ValidationCode::temporal_self_relation, rel.earlier);

  if (candidate.global_annotation) {
    const GlobalAnnotation& ann = *candidate.global_annotation;
    if (candidate.reference_kind != ReferenceKind::human)
      add(ValidationCode::annotation_requires_human_reference,
          candidate.instance_id);

    std::set<std::string> sub_events;
    for (const std::string& s : ann.sub_events)
      if (!sub_events.insert(s).second)
        add(ValidationCode::duplicate_sub_event, s);

    for (const Argument& arg : ann.arguments) {
      if (arg.text.empty())
        add(ValidationCode::empty_argument_text, candidate.instance_id);
      for (const std::string& coref : arg.corefs)
        if (coref == arg.text)
          add(ValidationCode::coref_duplicates_argument, arg.text);
    }

    for (const CausalRelation& rel : ann.causal) {
      if (rel.cause_sentence == rel.effect_sentence)
        add(ValidationCode::causal_self_relation, rel.cause_sentence);
      if (!sub_events.count(rel.cause_sentence))
        add(ValidationCode::dangling_causal_endpoint, rel.cause_sentence);
      if (!sub_events.count(rel.effect_sentence))
        add(ValidationCode::dangling_causal_endpoint, rel.effect_sentence);
    }
  }
  return issues;
}

Instance validate_instance(Instance candidate, int min_docs, int max_docs) {
  std::vector<ValidationIssue> issues = validate(candidate, min_docs, max_docs);
  if (issues.empty()) return candidate;
  std::ostringstream msg;
  msg << "instance " << candidate.instance_id << " invalid:";
  for (const ValidationIssue& issue : issues)
    msg << " [" << to_string(issue.code) << ": " << issue.detail << "]";
  throw ValidationError(msg.str(), std::move(issues));
}

namespace {

ArgumentRole role_from_string(const std::string& s) {
  if (s == "time") return ArgumentRole::time;
  if (s == "location") return ArgumentRole::location;
  if (s == "person") return ArgumentRole::person;
  if (s == "organization") return ArgumentRole::organization;
  throw ToolkitError("unknown argument role: " + s);
}

CausalKind causal_kind_from_string(const std::string& s) {
  if (s == "cause") return CausalKind::cause;
  if (s == "precondition") return CausalKind::precondition;
  throw ToolkitError("unknown causal kind: " + s);
}

std::optional<Date> date_field(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return Date::parse_iso(j.at(key).get<std::string>());
}

}  // namespace

json to_json(const Document& d) {
  json j;
  j["doc_id"] = d.doc_id;
  j["source"] = d.source;
  j["title"] = d.title;
  if (d.publish_time) j["publish_time"] = d.publish_time->iso();
  if (d.publish_time_raw) j["publish_time_raw"] = *d.publish_time_raw;
  j["body"] = d.body;
  return j;
}

json to_json(const TemporalRelation& r) {
  return json{{"earlier", r.earlier}, {"later", r.later}, {"relation", "before"}};
}

json to_json(const Argument& a) {
  return json{{"text", a.text}, {"role", to_string(a.role)}, {"corefs", a.corefs}};
}

json to_json(const CausalRelation& c) {
  return json{{"cause_sentence", c.cause_sentence},
              {"effect_sentence", c.effect_sentence},
              {"kind", to_string(c.kind)}};
}

json to_json(const GlobalAnnotation& g) {
  json j;
  j["sub_events"] = g.sub_events;
  j["arguments"] = json::array();
  for (const Argument& a : g.arguments) j["arguments"].push_back(to_json(a));
  j["causal"] = json::array();
  for (const CausalRelation& c : g.causal) j["causal"].push_back(to_json(c));
  return j;
}

json to_json(const Instance& i) {
  json j;
  j["instance_id"] = i.instance_id;
  j["event_title"] = i.event_title;
  j["documents"] = json::array();
  for (const Document& d : i.documents) j["documents"].push_back(to_json(d));
  j["reference"] = i.reference;
  j["reference_kind"] = to_string(i.reference_kind);
  j["temporal"] = json::array();
  for (const TemporalRelation& r : i.temporal) j["temporal"].push_back(to_json(r));
  if (i.global_annotation) j["global_annotation"] = to_json(*i.global_annotation);
  if (i.event_date) j["event_date"] = i.event_date->iso();
  if (!i.card.empty()) j["card"] = i.card;
  return j;
}

json to_json(const GeneratedSummary& s) {
  return json{{"instance_id", s.instance_id},
              {"system_id", s.system_id},
              {"text", s.text},
              {"shots", s.shots}};
}

Document document_from_json(const json& j) {
  Document d;
  d.doc_id = j.at("doc_id").get<std::string>();
  d.source = j.value("source", "");
  d.title = j.value("title", "");
  d.body = j.at("body").get<std::string>();
  if (j.contains("publish_time") && !j.at("publish_time").is_null()) {
    const std::string raw = j.at("publish_time").get<std::string>();
    d.publish_time = Date::parse_iso(raw);
    if (!d.publish_time) d.publish_time_raw = raw;
  }
  if (j.contains("publish_time_raw"))
    d.publish_time_raw = j.at("publish_time_raw").get<std::string>();
  return d;
}

TemporalRelation temporal_from_json(const json& j) {
  TemporalOrder order = TemporalOrder::before;
  if (j.contains("relation")) {
    const std::string rel = j.at("relation").get<std::string>();
    if (rel == "after")
      order = TemporalOrder::after;
    else if (rel != "before")
      throw ToolkitError("unknown temporal relation: " + rel);
  }
  return TemporalRelation(j.at("earlier").get<std::string>(),
                          j.at("later").get<std::string>(), order);
}

Argument argument_from_json(const json& j) {
  Argument a;
  a.text = j.at("text").get<std::string>();
  a.role = role_from_string(j.at("role").get<std::string>());
  if (j.contains("corefs")) a.corefs = j.at("corefs").get<std::vector<std::string>>();
  return a;
}

CausalRelation causal_from_json(const json& j) {
  CausalRelation c;
  c.cause_sentence = j.at("cause_sentence").get<std::string>();
  c.effect_sentence = j.at("effect_sentence").get<std::string>();
  c.kind = causal_kind_from_string(j.at("kind").get<std::string>());
  return c;
}

GlobalAnnotation annotation_from_json(const json& j) {
  GlobalAnnotation g;
  if (j.contains("sub_events"))
    g.sub_events = j.at("sub_events").get<std::vector<std::string>>();
  if (j.contains("arguments"))
    for (const json& a : j.at("arguments")) g.arguments.push_back(argument_from_json(a));
  if (j.contains("causal"))
    for (const json& c : j.at("causal")) g.causal.push_back(causal_from_json(c));
  return g;
}

Instance instance_from_json(const json& j) {
  Instance i;
  i.instance_id = j.at("instance_id").get<std::string>();
  i.event_title = j.value("event_title", "");
  for (const json& d : j.at("documents")) i.documents.push_back(document_from_json(d));
  i.reference = j.at("reference").get<std::string>();
  const std::string kind = j.value("reference_kind", "auto");
  if (kind == "human")
    i.reference_kind = ReferenceKind::human;
  else if (kind == "auto")
    i.reference_kind = ReferenceKind::auto_built;
  else
    throw ToolkitError("unknown reference_kind: " + kind);
  if (j.contains("temporal"))
    for (const json& t : j.at("temporal")) i.temporal.push_back(temporal_from_json(t));
  if (j.contains("global_annotation") && !j.at("global_annotation").is_null())
    i.global_annotation = annotation_from_json(j.at("global_annotation"));
  i.event_date = date_field(j, "event_date");
  if (j.contains("card"))
    i.card = j.at("card").get<std::map<std::string, std::string>>();
  return i;
}

GeneratedSummary summary_from_json(const json& j) {
  GeneratedSummary s;
  s.instance_id = j.at("instance_id").get<std::string>();
  s.system_id = j.at("system_id").get<std::string>();
  s.text = j.at("text").get<std::string>();
  s.shots = j.value("shots", 0);
  if (s.shots < 0) throw ToolkitError("shots must be >= 0");
  return s;
}

std::string serialize_instance(const Instance& i) { return to_json(i).dump(); }

std::string serialize_summary(const GeneratedSummary& s) { return to_json(s).dump(); }

namespace {

template <typename Fn>
void for_each_line(const std::filesystem::path& file, Fn fn) {
  std::ifstream in(file);
  if (!in) throw ToolkitError("cannot open " + file.string());
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    fn(line_no, line);
  }
}

}  // namespace

std::vector<Instance> load_corpus_file(const std::filesystem::path& file) {
  std::vector<Instance> out;
  for_each_line(file, [&](size_t line_no, const std::string& line) {
    try {
      json j = json::parse(line);
      out.push_back(validate_instance(instance_from_json(j)));
    } catch (const MalformedRecordError&) {
      throw;
    } catch (const std::exception& e) {
      throw MalformedRecordError(line_no, e.what());
    }
  });
  return out;
}

std::vector<Instance> load_corpus(const std::filesystem::path& dir, Split split) {
  return load_corpus_file(dir / split_filename(split));
}

void save_corpus_file(const std::filesystem::path& file,
                      const std::vector<Instance>& instances) {
  std::ofstream out(file, std::ios::trunc);
  if (!out) throw ToolkitError("cannot write " + file.string());
  for (const Instance& i : instances) out << serialize_instance(i) << '\n';
}

std::vector<GeneratedSummary> load_predictions(const std::filesystem::path& file) {
  std::vector<GeneratedSummary> out;
  std::set<std::tuple<std::string, std::string, int>> keys;
  for_each_line(file, [&](size_t line_no, const std::string& line) {
    try {
      GeneratedSummary s = summary_from_json(json::parse(line));
      if (!keys.insert({s.instance_id, s.system_id, s.shots}).second)
        throw ToolkitError("duplicate prediction key (" + s.instance_id + ", " +
                           s.system_id + ", " + std::to_string(s.shots) + ")");
      out.push_back(std::move(s));
    } catch (const std::exception& e) {
      throw MalformedRecordError(line_no, e.what());
    }
  });
  return out;
}

void save_predictions(const std::filesystem::path& file,
                      const std::vector<GeneratedSummary>& summaries) {
  std::ofstream out(file, std::ios::trunc);
  if (!out) throw ToolkitError("cannot write " + file.string());
  for (const GeneratedSummary& s : summaries) out << serialize_summary(s) << '\n';
}

}  // namespace mdseval::data
