#include "mdseval/nli_builder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "mdseval/config.hpp"
#include "mdseval/text.hpp"

namespace mdseval::nli {

using nlohmann::json;

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::positive: return "positive";
    case Strategy::remove: return "remove";
    case Strategy::revise: return "revise";
    case Strategy::replace: return "replace";
  }
  return "positive";
}

Strategy strategy_from_string(std::string_view s) {
  if (s == "positive") return Strategy::positive;
  if (s == "remove") return Strategy::remove;
  if (s == "revise") return Strategy::revise;
  if (s == "replace") return Strategy::replace;
  throw ToolkitError("unknown strategy: " + std::string(s));
}

json to_json(const NliPair& p) {
  return json{{"t1", p.t1},
              {"t2", p.t2},
              {"label", p.label},
              {"kind", recall::to_string(p.kind)},
              {"strategy", to_string(p.strategy)},
              {"source_id", p.source_id}};
}

NliPair pair_from_json(const json& j) {
  NliPair p;
  p.t1 = j.at("t1").get<std::string>();
  p.t2 = j.at("t2").get<std::string>();
  p.label = j.at("label").get<int>();
  p.kind = recall::kind_from_string(j.at("kind").get<std::string>());
  p.strategy = strategy_from_string(j.at("strategy").get<std::string>());
  p.source_id = j.at("source_id").get<std::string>();
  if ((p.label == 1) != (p.strategy == Strategy::positive))
    throw ToolkitError("label/strategy mismatch for source " + p.source_id);
  if (p.t1.empty() || p.t2.empty())
    throw ToolkitError("empty pair text for source " + p.source_id);
  return p;
}

NliSource source_from_json(const json& j) {
  NliSource s;
  s.source_id = j.at("source_id").get<std::string>();
  s.kind = recall::kind_from_string(j.at("kind").get<std::string>());
  s.text = j.at("text").get<std::string>();
  if (j.contains("event_fields"))
    s.event_fields = j.at("event_fields").get<std::map<std::string, std::string>>();
  if (j.contains("argument")) s.argument = data::argument_from_json(j.at("argument"));
  if (j.contains("causal")) s.causal = data::causal_from_json(j.at("causal"));
  if (j.contains("temporal")) s.temporal = data::temporal_from_json(j.at("temporal"));
  if (j.contains("anchors"))
    s.anchors = j.at("anchors").get<std::vector<std::string>>();
  return s;
}

std::vector<NliSource> load_sources(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ToolkitError("cannot open " + file.string());
  std::vector<NliSource> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(source_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw data::MalformedRecordError(line_no, e.what());
    }
  }
  return out;
}

std::vector<std::string> anchor_keys(const NliSource& source) {
  std::vector<std::string> keys;
  auto add = [&](const std::string& raw) {
    const std::string key = text::normalize_for_match(raw);
    if (!key.empty()) keys.push_back(key);
  };
  for (const std::string& a : source.anchors) add(a);
  if (!source.anchors.empty()) return keys;

  switch (source.kind) {
    case recall::ElementKind::event:
      for (const char* field : {"trigger", "time"}) {
        auto it = source.event_fields.find(field);
        if (it != source.event_fields.end()) add(it->second);
      }
      break;
    case recall::ElementKind::argument:
      if (source.argument) add(source.argument->text);
      break;
    case recall::ElementKind::causal:
      if (source.causal) {
        add(source.causal->cause_sentence);
        add(source.causal->effect_sentence);
      }
      break;
    case recall::ElementKind::temporal:
      if (source.temporal) {
        add(source.temporal->earlier);
        add(source.temporal->later);
      }
      break;
  }
  return keys;
}

std::string TemplateRephraser::to_sentence(const NliSource& record) {
  switch (record.kind) {
    case recall::ElementKind::causal:
      if (!record.causal) throw RephraserError("causal record without relation");
      return recall::render_payload(recall::ElementPayload(*record.causal));
    case recall::ElementKind::temporal:
      if (!record.temporal) throw RephraserError("temporal record without relation");
      return recall::render_payload(recall::ElementPayload(*record.temporal));
    case recall::ElementKind::argument:
      if (!record.argument) throw RephraserError("argument record without argument");
      return record.argument->text;
    case recall::ElementKind::event:
      break;
  }
  std::string sentence;
  auto field = [&](const char* key) -> std::string {
    auto it = record.event_fields.find(key);
    return it == record.event_fields.end() ? "" : it->second;
  };
  const std::string time = field("time");
  const std::string location = field("location");
  if (!time.empty()) sentence += time + "，";
  if (!location.empty()) sentence += "在" + location + "，";
  sentence += field("person") + field("organization") + field("subject");
  const std::string trigger = field("trigger");
  sentence += trigger.empty() ? "发生相关事件" : trigger;
  sentence += field("object");
  sentence += "。";
  if (sentence == "。") throw RephraserError("event record has no fields to rephrase");
  return sentence;
}

std::string TemplateRephraser::revise(const std::string& sentence) {
  std::string out = sentence;
  for (char& c : out) {
    if (c >= '0' && c <= '9') {
      c = static_cast<char>('0' + (c - '0' + 1) % 10);
      return out;
    }
  }
  return out + "，随后有关方面公布了更多细节";
}

namespace {

std::string replace_all_but_first(const std::string& text, const std::string& from,
                                  const std::string& to) {
  const size_t first = text.find(from);
  if (first == std::string::npos) return text;
  std::string out = text.substr(0, first + from.size());
  size_t pos = first + from.size();
  while (true) {
    const size_t next = text.find(from, pos);
    if (next == std::string::npos) {
      out += text.substr(pos);
      break;
    }
    out += text.substr(pos, next - pos);
    out += to;
    pos = next + from.size();
  }
  return out;
}

}  // namespace

NliPair make_positive(const NliSource& record, Rephraser& rephraser,
                      int max_retries) {
  NliPair pair;
  pair.kind = record.kind;
  pair.strategy = Strategy::positive;
  pair.label = 1;
  pair.source_id = record.source_id;
  pair.t1 = record.text;

  if (record.kind == recall::ElementKind::argument) {
    if (!record.argument)
      throw RephraserError("argument record " + record.source_id +
                           " carries no argument");
    const data::Argument& arg = *record.argument;
    if (arg.corefs.empty()) {
      pair.t2 = arg.text;
    } else {
      const std::string& coref = arg.corefs.front();
      pair.t1 = replace_all_but_first(record.text, arg.text, coref);
      pair.t2 = coref;
    }
  } else {
    std::string last_error;
    for (int attempt = 0; attempt < max_retries; ++attempt) {
      try {
        pair.t2 = rephraser.to_sentence(record);
        if (!pair.t2.empty()) break;
        last_error = "rephraser returned empty sentence";
      } catch (const std::exception& e) {
        last_error = e.what();
      }
    }
    if (pair.t2.empty())
      throw RephraserError("rephrasing failed for " + record.source_id + ": " +
                           last_error);
  }

  if (pair.t1.empty() || pair.t2.empty())
    throw NliBuildError("empty pair text for source " + record.source_id);
  return pair;
}

NliPair negative_remove(const NliPair& pair, corpus::EmbeddingProvider& provider,
                        double threshold) {
  if (pair.label != 1)
    throw NliBuildError("negative_remove expects a positive pair");
  const std::vector<std::string> sentences = text::split_sentences(pair.t1);

  std::vector<std::string> texts;
  texts.push_back(pair.t2);
  texts.insert(texts.end(), sentences.begin(), sentences.end());
  const auto vectors = provider.embed(texts);

  std::string kept;
  int removed = 0;
  for (size_t i = 0; i < sentences.size(); ++i) {
    if (provider.similarity(vectors[i + 1], vectors[0]) > threshold) {
      ++removed;
      continue;
    }
    kept += sentences[i];
  }
  if (removed == 0)
    throw DegenerateRemovalError(
        "no sentence exceeds the removal threshold for " + pair.source_id);
  if (kept.empty())
    throw EmptyRemovalError("removal left no text for " + pair.source_id);

  NliPair out = pair;
  out.t1 = std::move(kept);
  out.label = 0;
  out.strategy = Strategy::remove;
  return out;
}

NliPair negative_revise(const NliPair& pair, Rephraser& rephraser,
                        int max_retries) {
  if (pair.label != 1)
    throw NliBuildError("negative_revise expects a positive pair");
  std::string last_error;
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    std::string revised;
    try {
      revised = rephraser.revise(pair.t2);
    } catch (const std::exception& e) {
      last_error = e.what();
      continue;
    }
    if (revised.empty() || revised == pair.t2) {
      last_error = "revision identical to input";
      continue;
    }
    NliPair out = pair;
    out.t2 = std::move(revised);
    out.label = 0;
    out.strategy = Strategy::revise;
    return out;
  }
  if (last_error == "revision identical to input")
    throw IdenticalRevisionError("revision unchanged after retries for " +
                                 pair.source_id);
  throw RephraserError("revision failed for " + pair.source_id + ": " + last_error);
}

NliPair negative_replace(const NliPair& pair, const NliSource& origin,
                         const std::vector<NliSource>& pool,
                         corpus::EmbeddingProvider& provider) {
  if (pair.label != 1)
    throw NliBuildError("negative_replace expects a positive pair");

  const std::vector<std::string> origin_anchors = anchor_keys(origin);
  auto shares_anchor = [&](const NliSource& candidate) {
    const std::vector<std::string> keys = anchor_keys(candidate);
    for (const std::string& a : origin_anchors)
      if (std::find(keys.begin(), keys.end(), a) != keys.end()) return true;
    return false;
  };

  std::vector<size_t> eligible;
  for (size_t i = 0; i < pool.size(); ++i) {
    const NliSource& candidate = pool[i];
    if (candidate.source_id == origin.source_id) continue;
    if (candidate.text == pair.t1) continue;
    if (shares_anchor(candidate)) continue;
    eligible.push_back(i);
  }
  if (eligible.empty())
    throw NoEligibleReplacementError("no eligible replacement for " +
                                     pair.source_id);

  std::vector<std::string> texts;
  texts.push_back(pair.t2);
  for (size_t i : eligible) texts.push_back(pool[i].text);
  const auto vectors = provider.embed(texts);

  size_t best = 0;
  double best_score = -2.0;
  for (size_t i = 0; i < eligible.size(); ++i) {
    const double score = provider.similarity(vectors[i + 1], vectors[0]);
    if (score > best_score) {
      best_score = score;
      best = eligible[i];
    }
  }

  NliPair out = pair;
  out.t1 = pool[best].text;
  out.label = 0;
  out.strategy = Strategy::replace;
  return out;
}

void BuildPlan::validate() const {
  if (negative_fraction <= 0.0 || negative_fraction >= 1.0)
    throw ToolkitError("negative_fraction must lie in (0,1)");
  double mix = 0.0;
  for (const auto& [strategy, weight] : strategy_mix) {
    if (strategy == Strategy::positive)
      throw ToolkitError("strategy_mix covers negative strategies only");
    if (weight < 0.0) throw ToolkitError("strategy weights must be >= 0");
    mix += weight;
  }
  if (std::abs(mix - 1.0) > 1e-9)
    throw ToolkitError("strategy_mix weights must sum to 1");
  if (replace_pool_size < 1) throw ToolkitError("replace_pool_size must be >= 1");
  double total = split_fractions[0] + split_fractions[1] + split_fractions[2];
  if (std::abs(total - 1.0) > 1e-9)
    throw ToolkitError("split fractions must sum to 1");
}

BuildPlan BuildPlan::from_file(const std::filesystem::path& path) {
  BuildPlan plan;
  for (const auto& [key, value] : cli::parse_key_value_file(path)) {
    if (key == "negative_fraction")
      plan.negative_fraction = std::stod(value);
    else if (key == "remove_weight")
      plan.strategy_mix[Strategy::remove] = std::stod(value);
    else if (key == "revise_weight")
      plan.strategy_mix[Strategy::revise] = std::stod(value);
    else if (key == "replace_weight")
      plan.strategy_mix[Strategy::replace] = std::stod(value);
    else if (key == "replace_pool_size")
      plan.replace_pool_size = std::stoi(value);
    else if (key == "remove_threshold")
      plan.remove_threshold = std::stod(value);
    else if (key == "train_fraction")
      plan.split_fractions[0] = std::stod(value);
    else if (key == "dev_fraction")
      plan.split_fractions[1] = std::stod(value);
    else if (key == "test_fraction")
      plan.split_fractions[2] = std::stod(value);
    else if (key == "train_cap" || key == "dev_cap" || key == "test_cap") {
      if (!plan.split_caps) plan.split_caps = std::array<long, 3>{-1, -1, -1};
      const int idx = key == "train_cap" ? 0 : key == "dev_cap" ? 1 : 2;
      (*plan.split_caps)[idx] = std::stol(value);
    } else {
      throw ToolkitError("unknown build plan key: " + key);
    }
  }
  plan.validate();
  return plan;
}

namespace {

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char b : s) h = (h ^ b) * 0x100000001b3ULL;
  return h;
}

uint64_t mix(uint64_t a, uint64_t b) {
  uint64_t x = a + 0x9E3779B97F4A7C15ULL * (b + 1);
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

data::Split split_of_source(const std::string& source_id,
                            const std::array<double, 3>& fractions) {
  const double u = static_cast<double>(fnv1a(source_id) >> 11) /
                   static_cast<double>(1ULL << 53);
  if (u < fractions[0]) return data::Split::train;
  if (u < fractions[0] + fractions[1]) return data::Split::dev;
  return data::Split::test;
}

DatasetBuild build_dataset(const std::vector<NliSource>& sources,
                           const BuildPlan& plan, Rephraser& rephraser,
                           corpus::EmbeddingProvider& provider, uint64_t seed) {
  plan.validate();
  if (sources.empty()) throw NliBuildError("no source records");

  // which records convert to negatives: seeded shuffle, first k
  std::vector<size_t> order(sources.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const size_t n_negative = static_cast<size_t>(
      std::llround(static_cast<double>(sources.size()) * plan.negative_fraction));
  std::set<size_t> to_convert(order.begin(), order.begin() + n_negative);

  // ordered strategies for cumulative sampling
  const std::array<Strategy, 3> strategies = {Strategy::remove, Strategy::revise,
                                              Strategy::replace};
  std::array<double, 3> cumulative{};
  double acc = 0.0;
  for (size_t i = 0; i < strategies.size(); ++i) {
    auto it = plan.strategy_mix.find(strategies[i]);
    acc += it == plan.strategy_mix.end() ? 0.0 : it->second;
    cumulative[i] = acc;
  }

  DatasetBuild build;
  build.manifest.seed = seed;
  long skipped = 0;

  for (size_t idx = 0; idx < sources.size(); ++idx) {
    const NliSource& record = sources[idx];
    // per-record generator: parallel and serial construction agree
    std::mt19937_64 record_rng(mix(seed, idx));
    try {
      NliPair pair = make_positive(record, rephraser);
      if (to_convert.count(idx)) {
        const double u =
            std::uniform_real_distribution<double>(0.0, 1.0)(record_rng);
        Strategy strategy = strategies.back();
        for (size_t i = 0; i < strategies.size(); ++i) {
          if (u < cumulative[i]) {
            strategy = strategies[i];
            break;
          }
        }
        switch (strategy) {
          case Strategy::remove:
            pair = negative_remove(pair, provider, plan.remove_threshold);
            break;
          case Strategy::revise:
            pair = negative_revise(pair, rephraser);
            break;
          case Strategy::replace: {
            // pool sampled without replacement from the other records
            std::vector<size_t> candidates;
            candidates.reserve(sources.size() - 1);
            for (size_t i = 0; i < sources.size(); ++i)
              if (i != idx) candidates.push_back(i);
            std::shuffle(candidates.begin(), candidates.end(), record_rng);
            const size_t pool_size = std::min(
                candidates.size(), static_cast<size_t>(plan.replace_pool_size));
            std::vector<NliSource> pool;
            pool.reserve(pool_size);
            for (size_t i = 0; i < pool_size; ++i)
              pool.push_back(sources[candidates[i]]);
            pair = negative_replace(pair, record, pool, provider);
            break;
          }
          case Strategy::positive:
            break;
        }
      }
      const data::Split split = split_of_source(record.source_id, plan.split_fractions);
      build.manifest
          .counts[recall::to_string(pair.kind)][data::to_string(split)]
                 [to_string(pair.strategy)]++;
      build.splits[static_cast<size_t>(split)].push_back(std::move(pair));
    } catch (const NliBuildError&) {
      ++skipped;
    }
  }

  if (plan.split_caps) {
    for (size_t i = 0; i < 3; ++i) {
      const long cap = (*plan.split_caps)[i];
      if (cap >= 0 && static_cast<long>(build.splits[i].size()) > cap)
        build.splits[i].resize(cap);
    }
    // recount after capping
    build.manifest.counts.clear();
    for (size_t i = 0; i < 3; ++i)
      for (const NliPair& pair : build.splits[i])
        build.manifest
            .counts[recall::to_string(pair.kind)]
                   [data::to_string(static_cast<data::Split>(i))]
                   [to_string(pair.strategy)]++;
  }

  build.manifest.skipped = skipped;
  if (skipped * 5 > static_cast<long>(sources.size()))
    throw BuildFailedError("more than 20% of pairs skipped (" +
                           std::to_string(skipped) + " of " +
                           std::to_string(sources.size()) + ")");
  return build;
}

json Manifest::to_json() const {
  json j;
  j["counts"] = counts;
  j["skipped"] = skipped;
  j["seed"] = seed;
  if (!declared_sizes.empty()) {
    json d = json::object();
    for (const auto& [kind, sizes] : declared_sizes)
      d[kind] = json{{"train", sizes[0]}, {"dev", sizes[1]}, {"test", sizes[2]}};
    j["declared_sizes"] = d;
  }
  return j;
}

Manifest Manifest::from_json(const json& j) {
  Manifest m;
  if (j.contains("counts"))
    m.counts = j.at("counts")
                   .get<std::map<std::string,
                                 std::map<std::string, std::map<std::string, long>>>>();
  m.skipped = j.value("skipped", 0L);
  m.seed = j.value("seed", 0ULL);
  if (j.contains("declared_sizes")) {
    for (const auto& [kind, sizes] : j.at("declared_sizes").items()) {
      std::array<long, 3> arr{sizes.at("train").get<long>(),
                              sizes.at("dev").get<long>(),
                              sizes.at("test").get<long>()};
      for (long v : arr)
        if (v < 0) throw ToolkitError("declared sizes must be non-negative");
      m.declared_sizes[kind] = arr;
    }
  }
  return m;
}

Manifest Manifest::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ToolkitError("cannot open " + file.string());
  json j;
  in >> j;
  return from_json(j);
}

void Manifest::save(const std::filesystem::path& file) const {
  std::ofstream out(file, std::ios::trunc);
  if (!out) throw ToolkitError("cannot write " + file.string());
  out << to_json().dump(2) << '\n';
}

void write_dataset(const std::filesystem::path& dir, const DatasetBuild& build) {
  std::filesystem::create_directories(dir);
  for (size_t i = 0; i < 3; ++i) {
    const data::Split split = static_cast<data::Split>(i);
    // pairs grouped into one file per (kind, split)
    std::map<std::string, std::ofstream> files;
    for (const NliPair& pair : build.splits[i]) {
      const std::string kind = recall::to_string(pair.kind);
      auto it = files.find(kind);
      if (it == files.end()) {
        const auto path = dir / (kind + "." + data::to_string(split) + ".jsonl");
        it = files.emplace(kind, std::ofstream(path, std::ios::trunc)).first;
        if (!it->second) throw ToolkitError("cannot write " + path.string());
      }
      it->second << to_json(pair).dump() << '\n';
    }
  }
  build.manifest.save(dir / "manifest.json");
}

}  // namespace mdseval::nli
