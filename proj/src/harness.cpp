#include "mdseval/harness.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <numeric>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "mdseval/text.hpp"

namespace mdseval::harness {

using nlohmann::json;

EchoBackend::EchoBackend(long context_limit) : context_limit_(context_limit) {}

std::string EchoBackend::generate(const std::string& prompt,
                                  const GenerationParams& params) {
  if (params.max_output_length <= 0) return prompt;
  const std::vector<uint32_t> cps = text::decode_utf8(prompt);
  if (cps.size() <= static_cast<size_t>(params.max_output_length)) return prompt;
  return text::encode_utf8(std::vector<uint32_t>(
      cps.begin(), cps.begin() + params.max_output_length));
}

namespace {

uint64_t fnv1a(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char b : s) h = (h ^ b) * 0x100000001b3ULL;
  return h;
}

std::string replace_placeholder(std::string text, const std::string& key,
                                const std::string& value) {
  const std::string token = "{" + key + "}";
  size_t pos = 0;
  while ((pos = text.find(token, pos)) != std::string::npos) {
    text.replace(pos, token.size(), value);
    pos += value.size();
  }
  return text;
}

}  // namespace

std::string PromptTemplate::hash() const {
  const std::string blob = preamble + '\x1f' + doc_delimiter + '\x1f' +
                           demonstration_block;
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(blob)));
  return buf;
}

PromptTemplate PromptTemplate::default_chinese() {
  PromptTemplate t;
  t.preamble =
      "请根据以下围绕同一事件的多篇新闻文档，撰写一篇简洁、全面的中文摘要。"
      "请按时间顺序组织关键信息，涵盖重要子事件及其时间、地点、人物、机构和"
      "因果关系，不要添加文档之外的内容，直接输出摘要正文。";
  t.doc_delimiter = "\n";
  t.demonstration_block = "示例输入：\n{documents}\n示例摘要：{summary}\n\n";
  return t;
}

PromptTemplate PromptTemplate::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ToolkitError("cannot open template " + path.string());
  json j;
  in >> j;
  PromptTemplate t;
  t.preamble = j.at("preamble").get<std::string>();
  t.doc_delimiter = j.value("doc_delimiter", "\n");
  t.demonstration_block = j.value("demonstration_block", "");
  return t;
}

void PromptTemplate::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ToolkitError("cannot write template " + path.string());
  out << json{{"preamble", preamble},
              {"doc_delimiter", doc_delimiter},
              {"demonstration_block", demonstration_block}}
             .dump(2)
      << '\n';
}

ContextOverflowError::ContextOverflowError(const std::string& id,
                                           size_t prompt_chars, long limit)
    : ToolkitError("prompt for instance " + id + " has " +
                   std::to_string(prompt_chars) +
                   " characters, backend limit is " + std::to_string(limit)),
      instance_id(id) {}

std::string render_documents(const data::Instance& instance,
                             const std::string& delimiter) {
  std::string out;
  for (size_t i = 0; i < instance.documents.size(); ++i) {
    if (i > 0) out += delimiter;
    out += "文档" + std::to_string(i + 1) + ":" + instance.documents[i].body;
  }
  return out;
}

std::string build_prompt(const data::Instance& instance,
                         const std::vector<Demonstration>& demonstrations,
                         const PromptTemplate& tmpl,
                         std::optional<long> context_limit) {
  std::string prompt = tmpl.preamble + "\n";
  for (const Demonstration& demo : demonstrations) {
    std::string block = replace_placeholder(
        tmpl.demonstration_block, "documents",
        render_documents(*demo.instance, tmpl.doc_delimiter));
    block = replace_placeholder(block, "summary", demo.summary);
    prompt += block;
  }
  prompt += render_documents(instance, tmpl.doc_delimiter);

  if (context_limit) {
    const size_t chars = text::length(prompt);
    if (chars > static_cast<size_t>(*context_limit))
      throw ContextOverflowError(instance.instance_id, chars, *context_limit);
  }
  return prompt;
}

std::string build_prompt_truncated(data::Instance instance,
                                   const std::vector<Demonstration>& demonstrations,
                                   const PromptTemplate& tmpl, long context_limit) {
  while (true) {
    std::string prompt = build_prompt(instance, demonstrations, tmpl);
    const long chars = static_cast<long>(text::length(prompt));
    if (chars <= context_limit) return prompt;
    const long overflow = chars - context_limit;

    size_t longest = 0;
    size_t longest_len = 0;
    for (size_t i = 0; i < instance.documents.size(); ++i) {
      const size_t len = text::length(instance.documents[i].body);
      if (len > longest_len) {
        longest_len = len;
        longest = i;
      }
    }
    if (longest_len == 0)
      throw ContextOverflowError(instance.instance_id,
                                 static_cast<size_t>(chars), context_limit);
    const std::vector<uint32_t> cps =
        text::decode_utf8(instance.documents[longest].body);
    const size_t keep = longest_len > static_cast<size_t>(overflow)
                            ? longest_len - static_cast<size_t>(overflow)
                            : 0;
    instance.documents[longest].body =
        text::encode_utf8(std::vector<uint32_t>(cps.begin(), cps.begin() + keep));
  }
}

std::vector<Demonstration> sample_demonstrations(
    const std::vector<data::Instance>& train, int shots, uint64_t seed) {
  if (shots <= 0) return {};
  if (static_cast<size_t>(shots) > train.size())
    throw ToolkitError("not enough training instances for " +
                       std::to_string(shots) + "-shot demonstrations");
  std::vector<size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Demonstration> out;
  out.reserve(shots);
  for (int i = 0; i < shots; ++i)
    out.push_back({&train[order[i]], train[order[i]].reference});
  return out;
}

json RunManifest::to_json() const {
  json j;
  j["system_id"] = system_id;
  j["shots"] = shots;
  j["backend"] = backend;
  j["temperature"] = params.temperature;
  j["max_output_length"] = params.max_output_length;
  if (params.seed) j["seed"] = *params.seed;
  j["template_hash"] = template_hash;
  j["completed"] = completed;
  j["skips"] = json::array();
  for (const SkipRecord& skip : skips)
    j["skips"].push_back({{"instance_id", skip.instance_id},
                          {"reason", skip.reason}});
  return j;
}

void RunManifest::save(const std::filesystem::path& file) const {
  std::ofstream out(file, std::ios::trunc);
  if (!out) throw ToolkitError("cannot write " + file.string());
  out << to_json().dump(2) << '\n';
}

RunResult run_batch(const std::vector<data::Instance>& targets,
                    GenerationBackend& backend, const GenerationParams& params,
                    const PromptTemplate& tmpl,
                    const std::vector<Demonstration>& demonstrations,
                    const RunOptions& options,
                    const std::filesystem::path& out_file) {
  RunResult result;
  result.manifest.system_id = options.system_id;
  result.manifest.shots = options.shots;
  result.manifest.backend = backend.identity();
  result.manifest.params = params;
  result.manifest.template_hash = tmpl.hash();

  std::set<std::string> demo_ids;
  for (const Demonstration& demo : demonstrations)
    demo_ids.insert(demo.instance->instance_id);

  // resume: keys already persisted are final
  std::map<std::string, data::GeneratedSummary> done;
  if (std::filesystem::exists(out_file)) {
    for (data::GeneratedSummary& s : data::load_predictions(out_file))
      if (s.system_id == options.system_id && s.shots == options.shots)
        done.emplace(s.instance_id, std::move(s));
  }

  std::ofstream out(out_file, std::ios::app);
  if (!out) throw ToolkitError("cannot write " + out_file.string());

  auto note_skip = [&](const std::string& id, const std::string& reason) {
    result.manifest.skips.push_back({id, reason});
    if (static_cast<double>(result.manifest.skips.size()) >
        options.abort_skip_rate * static_cast<double>(targets.size())) {
      result.manifest.save(out_file.string() + ".manifest.json");
      throw BatchAbortedError("skip rate exceeded " +
                              std::to_string(options.abort_skip_rate));
    }
  };

  auto generate_one =
      [&](const data::Instance& target) -> std::optional<std::string> {
    std::string prompt;
    try {
      if (options.truncate_on_overflow)
        prompt = build_prompt_truncated(target, demonstrations, tmpl,
                                        backend.context_limit());
      else
        prompt = build_prompt(target, demonstrations, tmpl, backend.context_limit());
    } catch (const ContextOverflowError&) {
      return std::nullopt;
    }
    for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
      try {
        return backend.generate(prompt, params);
      } catch (const std::exception&) {
        if (attempt == options.max_retries) return std::nullopt;
      }
    }
    return std::nullopt;
  };

  auto commit = [&](const data::Instance& target, std::optional<std::string> text) {
    if (!text) {
      // distinguish overflow from backend failure for the manifest
      std::string reason = "backend_failure";
      try {
        build_prompt(target, demonstrations, tmpl, backend.context_limit());
      } catch (const ContextOverflowError&) {
        reason = "context_overflow";
      }
      note_skip(target.instance_id, reason);
      return;
    }
    data::GeneratedSummary summary;
    summary.instance_id = target.instance_id;
    summary.system_id = options.system_id;
    summary.shots = options.shots;
    summary.text = std::move(*text);
    out << data::serialize_summary(summary) << '\n';
    out.flush();
    ++result.manifest.completed;
    result.summaries.push_back(std::move(summary));
  };

  std::vector<const data::Instance*> pending;
  for (const data::Instance& target : targets) {
    auto it = done.find(target.instance_id);
    if (it != done.end()) {
      ++result.manifest.completed;
      result.summaries.push_back(it->second);
      continue;
    }
    if (demo_ids.count(target.instance_id)) {
      note_skip(target.instance_id, "demonstration_collision");
      continue;
    }
    pending.push_back(&target);
  }

  if (options.jobs <= 1) {
    for (const data::Instance* target : pending)
      commit(*target, generate_one(*target));
  } else {
    // bounded fan-out with ordered commit, so output bytes match a serial run
    const size_t window = static_cast<size_t>(options.jobs);
    std::vector<std::future<std::optional<std::string>>> in_flight;
    size_t next = 0, committed = 0;
    while (committed < pending.size()) {
      while (next < pending.size() && in_flight.size() < window) {
        const data::Instance* target = pending[next++];
        in_flight.push_back(std::async(std::launch::async,
                                       [&, target] { return generate_one(*target); }));
      }
      commit(*pending[committed], in_flight.front().get());
      in_flight.erase(in_flight.begin());
      ++committed;
    }
  }

  result.manifest.save(out_file.string() + ".manifest.json");
  return result;
}

}  // namespace mdseval::harness
