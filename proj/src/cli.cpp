#include "mdseval/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <set>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mdseval/analysis.hpp"
#include "mdseval/corpus_builder.hpp"
#include "mdseval/data_model.hpp"
#include "mdseval/harness.hpp"
#include "mdseval/metrics.hpp"
#include "mdseval/nli_builder.hpp"
#include "mdseval/recall_metrics.hpp"
#include "mdseval/remote.hpp"
#include "mdseval/text.hpp"

namespace mdseval::cli {

using nlohmann::json;

namespace {

std::unique_ptr<recall::Discriminator> make_discriminator(const std::string& profile) {
  if (profile == "containment") return recall::containment_oracle();
  if (profile.rfind("http:", 0) == 0) {
    // http:HOST:PORT
    const size_t host_begin = 5;
    const size_t colon = profile.rfind(':');
    if (colon == std::string::npos || colon <= host_begin)
      throw ToolkitError("discriminator profile must be http:HOST:PORT");
    const std::string host = profile.substr(host_begin, colon - host_begin);
    const int port = std::stoi(profile.substr(colon + 1));
    return std::make_unique<remote::HttpDiscriminator>(host, port);
  }
  throw ToolkitError("unknown discriminator profile: " + profile);
}

std::unique_ptr<harness::GenerationBackend> make_backend(const std::string& profile) {
  if (profile == "echo") return std::make_unique<harness::EchoBackend>();
  if (profile.rfind("echo:", 0) == 0)
    return std::make_unique<harness::EchoBackend>(std::stol(profile.substr(5)));
  throw ToolkitError("unknown backend profile: " + profile);
}

std::unique_ptr<metrics::TokenEncoder> make_encoder(const std::string& profile) {
  if (profile == "hashing") return std::make_unique<metrics::HashingCharEncoder>();
  if (profile.rfind("hashing:", 0) == 0)
    return std::make_unique<metrics::HashingCharEncoder>(
        std::stoul(profile.substr(8)));
  throw ToolkitError("unknown encoder profile: " + profile);
}

std::filesystem::path corpus_split_path(const std::filesystem::path& corpus,
                                        const std::string& split_name) {
  if (std::filesystem::is_directory(corpus))
    return corpus / (split_name + ".jsonl");
  return corpus;
}

int run_build_corpus(const std::filesystem::path& raw_dir,
                     const std::filesystem::path& out_dir,
                     const std::filesystem::path& config_file, uint64_t seed,
                     const std::vector<double>& split_fractions) {
  corpus::PipelineConfig config;
  if (!config_file.empty()) config = corpus::PipelineConfig::from_file(config_file);

  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(raw_dir))
    if (entry.path().extension() == ".jsonl") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw ToolkitError("no .jsonl raw files under " + raw_dir.string());

  std::vector<corpus::RawEntry> entries;
  for (const auto& file : files) {
    std::vector<corpus::RawEntry> part = corpus::load_raw_entries(file);
    std::move(part.begin(), part.end(), std::back_inserter(entries));
  }

  corpus::HashingEmbeddingProvider provider;
  corpus::NullRelationAnnotator annotator;
  corpus::PipelineResult result =
      corpus::build_instances(entries, config, provider, annotator);

  // seeded shuffle, then contiguous split by the requested fractions
  std::vector<size_t> order(result.instances.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const size_t n = order.size();
  const size_t n_train = static_cast<size_t>(n * split_fractions[0]);
  const size_t n_dev = static_cast<size_t>(n * split_fractions[1]);

  std::array<std::vector<data::Instance>, 3> splits;
  for (size_t i = 0; i < n; ++i) {
    const size_t which = i < n_train ? 0 : i < n_train + n_dev ? 1 : 2;
    splits[which].push_back(result.instances[order[i]]);
  }
  std::filesystem::create_directories(out_dir);
  for (size_t i = 0; i < 3; ++i)
    data::save_corpus_file(
        out_dir / data::split_filename(static_cast<data::Split>(i)), splits[i]);

  std::cout << "entries=" << result.stats.entries
            << " instances=" << result.instances.size()
            << " non_event=" << result.stats.skipped_non_event
            << " empty_reference=" << result.stats.skipped_empty_reference
            << " too_few_docs=" << result.stats.rejected_too_few_docs
            << " truncated=" << result.stats.truncated
            << " temporal_dropped=" << result.stats.temporal_dropped << "\n";
  return 0;
}

int run_build_nli(const std::filesystem::path& sources_file,
                  const std::filesystem::path& out_dir, const std::string& kind,
                  const std::filesystem::path& plan_file, uint64_t seed,
                  const std::vector<std::string>& declarations) {
  std::vector<nli::NliSource> sources = nli::load_sources(sources_file);
  if (!kind.empty()) {
    const recall::ElementKind want = recall::kind_from_string(kind);
    std::erase_if(sources,
                  [&](const nli::NliSource& s) { return s.kind != want; });
  }
  nli::BuildPlan plan;
  if (!plan_file.empty()) plan = nli::BuildPlan::from_file(plan_file);

  nli::TemplateRephraser rephraser;
  corpus::HashingEmbeddingProvider provider;
  nli::DatasetBuild build =
      nli::build_dataset(sources, plan, rephraser, provider, seed);

  // external size declarations recorded as manifest metadata,
  // e.g. event=13265,2433,4481
  for (const std::string& decl : declarations) {
    const size_t eq = decl.find('=');
    if (eq == std::string::npos)
      throw ToolkitError("size declaration must be KIND=train,dev,test");
    const std::string decl_kind = decl.substr(0, eq);
    recall::kind_from_string(decl_kind);  // validate
    std::array<long, 3> sizes{};
    std::stringstream ss(decl.substr(eq + 1));
    std::string item;
    for (int i = 0; i < 3; ++i) {
      if (!std::getline(ss, item, ',') || item.empty())
        throw ToolkitError("size declaration must carry three counts");
      sizes[i] = std::stol(item);
      if (sizes[i] < 0) throw ToolkitError("declared sizes must be non-negative");
    }
    build.manifest.declared_sizes[decl_kind] = sizes;
  }

  nli::write_dataset(out_dir, build);
  long total = 0;
  for (const auto& split : build.splits) total += static_cast<long>(split.size());
  std::cout << "pairs=" << total << " skipped=" << build.manifest.skipped << "\n";
  return 0;
}

int run_summarize(const std::filesystem::path& corpus_dir,
                  const std::string& split_name, const std::string& system,
                  int shots, uint64_t seed, const std::string& backend_profile,
                  const std::filesystem::path& template_file,
                  const std::filesystem::path& out_dir, int jobs,
                  double temperature, int max_output, bool truncate_overflow) {
  const data::Split split = data::parse_split(split_name);
  const std::vector<data::Instance> targets = data::load_corpus(corpus_dir, split);

  std::vector<data::Instance> train;
  std::vector<harness::Demonstration> demos;
  if (shots > 0) {
    train = data::load_corpus(corpus_dir, data::Split::train);
    demos = harness::sample_demonstrations(train, shots, seed);
  }

  harness::PromptTemplate tmpl = template_file.empty()
                                     ? harness::PromptTemplate::default_chinese()
                                     : harness::PromptTemplate::from_file(template_file);
  std::unique_ptr<harness::GenerationBackend> backend = make_backend(backend_profile);

  harness::GenerationParams params;
  params.temperature = temperature;
  params.max_output_length = max_output;
  params.seed = seed;

  harness::RunOptions options;
  options.system_id = system;
  options.shots = shots;
  options.seed = seed;
  options.jobs = jobs;
  options.truncate_on_overflow = truncate_overflow;

  std::filesystem::create_directories(out_dir);
  const auto out_file =
      out_dir / (system + "." + std::to_string(shots) + "shot.jsonl");
  harness::RunResult result = harness::run_batch(targets, *backend, params, tmpl,
                                                 demos, options, out_file);
  std::cout << "completed=" << result.manifest.completed
            << " skipped=" << result.manifest.skips.size() << " out="
            << out_file.string() << "\n";
  return 0;
}

struct EvaluateOutcome {
  std::vector<analysis::ScoreRecord> scores;
  json verdicts = json::array();
};

EvaluateOutcome evaluate_predictions(const std::vector<data::Instance>& instances,
                                     const std::vector<data::GeneratedSummary>& preds,
                                     recall::Discriminator& discriminator,
                                     metrics::TokenEncoder& encoder,
                                     metrics::TokenUnit unit) {
  std::map<std::string, const data::Instance*> by_id;
  for (const data::Instance& instance : instances)
    by_id[instance.instance_id] = &instance;

  EvaluateOutcome outcome;
  for (const data::GeneratedSummary& pred : preds) {
    auto it = by_id.find(pred.instance_id);
    if (it == by_id.end())
      throw ToolkitError("prediction references unknown instance " +
                         pred.instance_id);
    const data::Instance& instance = *it->second;

    analysis::ScoreRecord record;
    record.instance_id = pred.instance_id;
    record.system_id = pred.system_id;
    record.shots = pred.shots;
    record.r1 = 100.0 * metrics::rouge_n(pred.text, instance.reference, 1, unit).f1;
    record.r2 = 100.0 * metrics::rouge_n(pred.text, instance.reference, 2, unit).f1;
    record.rl = 100.0 * metrics::rouge_l(pred.text, instance.reference, unit).f1;
    record.semantic_f1 =
        100.0 * metrics::semantic_f1(pred.text, instance.reference, encoder).f1;

    const auto recalls = recall::evaluate_summary(instance, pred, discriminator);
    auto pick = [&](recall::ElementKind kind) -> std::optional<double> {
      auto found = recalls.find(kind);
      if (found == recalls.end()) return std::nullopt;
      return 100.0 * found->second.recall;
    };
    record.er = pick(recall::ElementKind::event);
    record.ar = pick(recall::ElementKind::argument);
    record.cr = pick(recall::ElementKind::causal);
    record.tr = pick(recall::ElementKind::temporal);

    for (const auto& [kind, res] : recalls) {
      for (const recall::ElementVerdict& v : res.per_element) {
        json line;
        line["instance_id"] = pred.instance_id;
        line["system_id"] = pred.system_id;
        line["shots"] = pred.shots;
        line["kind"] = recall::to_string(kind);
        line["element"] = v.element.rendered ? *v.element.rendered : "";
        line["verdict"] = v.verdict;
        outcome.verdicts.push_back(std::move(line));
      }
    }
    outcome.scores.push_back(std::move(record));
  }
  return outcome;
}

int run_evaluate(const std::filesystem::path& predictions_file,
                 const std::filesystem::path& corpus,
                 const std::string& discriminator_profile,
                 const std::string& encoder_profile, const std::string& unit_name,
                 std::filesystem::path out_file,
                 const std::filesystem::path& verdicts_file) {
  const auto instances = data::load_corpus_file(corpus_split_path(corpus, "test"));
  const auto preds = data::load_predictions(predictions_file);

  std::unique_ptr<recall::Discriminator> discriminator =
      make_discriminator(discriminator_profile);
  std::unique_ptr<metrics::TokenEncoder> encoder = make_encoder(encoder_profile);
  metrics::TokenUnit unit;
  if (unit_name == "character")
    unit = metrics::TokenUnit::character;
  else if (unit_name == "word")
    unit = metrics::TokenUnit::word;
  else
    throw ToolkitError("--unit must be character or word");

  EvaluateOutcome outcome =
      evaluate_predictions(instances, preds, *discriminator, *encoder, unit);

  if (out_file.empty())
    out_file = predictions_file.parent_path() / "scores.jsonl";
  analysis::save_scores(out_file, outcome.scores);

  json meta;
  meta["discriminator"] = discriminator->identity();
  meta["encoder"] = encoder->identity();
  meta["unit"] = unit_name;
  meta["predictions"] = predictions_file.string();
  meta["corpus"] = corpus.string();
  meta["time_span_definition"] = "dates extracted from the reference summary";
  std::ofstream meta_out(out_file.string() + ".meta.json", std::ios::trunc);
  meta_out << meta.dump(2) << '\n';

  if (!verdicts_file.empty()) {
    std::ofstream v(verdicts_file, std::ios::trunc);
    if (!v) throw ToolkitError("cannot write " + verdicts_file.string());
    for (const json& line : outcome.verdicts) v << line.dump() << '\n';
  }
  std::cout << "scored=" << outcome.scores.size() << " out=" << out_file.string()
            << "\n";
  return 0;
}

int run_report(const std::filesystem::path& predictions_dir,
               std::filesystem::path scores_file,
               std::filesystem::path out_file) {
  if (scores_file.empty()) scores_file = predictions_dir / "scores.jsonl";
  const auto records = analysis::load_scores(scores_file);
  const auto rows = analysis::aggregate_report(records);
  const std::string table = analysis::render_table(rows);
  if (out_file.empty()) out_file = scores_file.parent_path() / "report.tsv";
  std::ofstream out(out_file, std::ios::trunc);
  if (!out) throw ToolkitError("cannot write " + out_file.string());
  out << table;
  std::cout << table;
  return 0;
}

int run_analyze(const std::filesystem::path& predictions_dir,
                std::filesystem::path scores_file,
                const std::filesystem::path& corpus, const std::string& by,
                std::filesystem::path out_file) {
  if (scores_file.empty()) scores_file = predictions_dir / "scores.jsonl";
  const auto records = analysis::load_scores(scores_file);
  const auto instances = data::load_corpus_file(corpus_split_path(corpus, "test"));

  analysis::Bucketing bucketing;
  if (by == "doc_count")
    bucketing = analysis::Bucketing::default_doc_count();
  else if (by == "time_span")
    bucketing = analysis::Bucketing::default_time_span();
  else
    throw ToolkitError("--by must be doc_count or time_span");

  const analysis::BucketedReport report =
      analysis::bucket_metrics(records, instances, bucketing);
  json plot = report.plot_data();
  plot["time_span_definition"] = "dates extracted from the reference summary";
  if (out_file.empty())
    out_file = predictions_dir / ("analysis_" + by + ".json");
  std::ofstream out(out_file, std::ios::trunc);
  if (!out) throw ToolkitError("cannot write " + out_file.string());
  out << plot.dump(2) << '\n';

  for (size_t i = 0; i < report.labels.size(); ++i)
    std::cout << report.labels[i] << "\tsize=" << report.sizes[i] << "\n";
  return 0;
}

int run_stats(const std::filesystem::path& corpus, const std::string& split_name) {
  const auto instances =
      data::load_corpus_file(corpus_split_path(corpus, split_name));
  if (instances.empty()) throw ToolkitError("corpus is empty");
  long total_docs = 0, total_input_chars = 0, total_ref_chars = 0;
  for (const data::Instance& instance : instances) {
    total_docs += static_cast<long>(instance.documents.size());
    for (const data::Document& doc : instance.documents)
      total_input_chars += static_cast<long>(text::length(doc.body));
    total_ref_chars += static_cast<long>(text::length(instance.reference));
  }
  const double n = static_cast<double>(instances.size());
  std::printf("instances: %zu\n", instances.size());
  std::printf("mean_docs_per_instance: %.1f\n", total_docs / n);
  std::printf("mean_input_chars: %.0f\n", total_input_chars / n);
  std::printf("mean_reference_chars: %.0f\n", total_ref_chars / n);
  return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"corpus, metric and report toolkit for event-centric "
               "multi-document summarization"};
  app.require_subcommand(1);

  // build-corpus
  auto* build_corpus = app.add_subcommand(
      "build-corpus", "build corpus instances from raw entry dumps");
  std::filesystem::path raw_dir, bc_out, bc_config;
  uint64_t bc_seed = 0;
  std::vector<double> bc_splits = {0.8, 0.1, 0.1};
  build_corpus->add_option("--raw", raw_dir, "directory of raw entry .jsonl dumps")
      ->required();
  build_corpus->add_option("--out", bc_out, "output corpus directory")->required();
  build_corpus->add_option("--config", bc_config, "pipeline config file");
  build_corpus->add_option("--seed", bc_seed, "split shuffle seed");
  build_corpus->add_option("--splits", bc_splits, "train/dev/test fractions")
      ->expected(3);

  // build-nli-data
  auto* build_nli = app.add_subcommand(
      "build-nli-data", "construct entailment training pairs");
  std::filesystem::path nli_sources, nli_out, nli_plan;
  std::string nli_kind;
  uint64_t nli_seed = 0;
  std::vector<std::string> nli_declarations;
  build_nli->add_option("--sources", nli_sources, "structured source records")
      ->required();
  build_nli->add_option("--out", nli_out, "output directory")->required();
  build_nli->add_option("--kind", nli_kind,
                        "restrict to one kind (event/argument/causal/temporal)");
  build_nli->add_option("--plan", nli_plan, "build plan file");
  build_nli->add_option("--seed", nli_seed, "strategy sampling seed");
  build_nli->add_option("--declare", nli_declarations,
                        "declared external sizes, KIND=train,dev,test");

  // summarize
  auto* summarize = app.add_subcommand("summarize", "run a summarization system");
  std::filesystem::path sm_corpus, sm_template, sm_out = ".";
  std::string sm_split = "test", sm_system, sm_backend = "echo";
  int sm_shots = 0, sm_jobs = 1, sm_max_output = 0;
  uint64_t sm_seed = 0;
  double sm_temperature = 0.01;
  bool sm_truncate = false;
  summarize->add_option("--corpus", sm_corpus, "corpus directory")->required();
  summarize->add_option("--split", sm_split, "target split");
  summarize->add_option("--system", sm_system, "system identifier")->required();
  summarize->add_option("--shots", sm_shots, "number of demonstrations");
  summarize->add_option("--seed", sm_seed, "demonstration sampling seed");
  summarize->add_option("--backend", sm_backend, "generation backend profile");
  summarize->add_option("--template", sm_template, "prompt template asset");
  summarize->add_option("--out", sm_out, "output directory");
  summarize->add_option("--jobs", sm_jobs, "max in-flight generations");
  summarize->add_option("--temperature", sm_temperature, "sampling temperature");
  summarize->add_option("--max-output", sm_max_output,
                        "output cap in characters (0 = uncapped)");
  summarize->add_flag("--truncate-overflow", sm_truncate,
                      "tail-truncate longest documents instead of skipping "
                      "oversized instances");

  // evaluate
  auto* evaluate = app.add_subcommand(
      "evaluate", "score predictions against the corpus");
  std::filesystem::path ev_predictions, ev_corpus, ev_out, ev_verdicts;
  std::string ev_discriminator = "containment", ev_encoder = "hashing";
  evaluate->add_option("--predictions", ev_predictions, "predictions JSONL")
      ->required();
  evaluate->add_option("--corpus", ev_corpus, "corpus file (or directory)")
      ->required();
  evaluate->add_option("--discriminator", ev_discriminator,
                       "containment | http:HOST:PORT");
  evaluate->add_option("--encoder", ev_encoder, "semantic encoder profile");
  std::string ev_unit = "character";
  evaluate->add_option("--unit", ev_unit, "scoring unit: character | word");
  evaluate->add_option("--out", ev_out, "score records output file");
  evaluate->add_option("--verdicts", ev_verdicts, "per-element verdict dump");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "bucketed metric breakdowns");
  std::filesystem::path an_predictions, an_scores, an_corpus, an_out;
  std::string an_by = "doc_count";
  analyze->add_option("--predictions", an_predictions, "predictions directory")
      ->required();
  analyze->add_option("--scores", an_scores, "score records file");
  analyze->add_option("--corpus", an_corpus, "corpus file (or directory)")
      ->required();
  analyze->add_option("--by", an_by, "doc_count | time_span");
  analyze->add_option("--out", an_out, "plot data output file");

  // report
  auto* report = app.add_subcommand("report", "aggregate scores into a table");
  std::filesystem::path rp_predictions, rp_scores, rp_out;
  report->add_option("--predictions", rp_predictions, "predictions directory")
      ->required();
  report->add_option("--scores", rp_scores, "score records file");
  report->add_option("--out", rp_out, "table output file");

  // stats
  auto* stats = app.add_subcommand("stats", "corpus statistics");
  std::filesystem::path st_corpus;
  std::string st_split = "test";
  stats->add_option("--corpus", st_corpus, "corpus file (or directory)")
      ->required();
  stats->add_option("--split", st_split, "split when --corpus is a directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (build_corpus->parsed())
      return run_build_corpus(raw_dir, bc_out, bc_config, bc_seed, bc_splits);
    if (build_nli->parsed())
      return run_build_nli(nli_sources, nli_out, nli_kind, nli_plan, nli_seed,
                           nli_declarations);
    if (summarize->parsed())
      return run_summarize(sm_corpus, sm_split, sm_system, sm_shots, sm_seed,
                           sm_backend, sm_template, sm_out, sm_jobs,
                           sm_temperature, sm_max_output, sm_truncate);
    if (evaluate->parsed())
      return run_evaluate(ev_predictions, ev_corpus, ev_discriminator,
                          ev_encoder, ev_unit, ev_out, ev_verdicts);
    if (analyze->parsed())
      return run_analyze(an_predictions, an_scores, an_corpus, an_by, an_out);
    if (report->parsed()) return run_report(rp_predictions, rp_scores, rp_out);
    if (stats->parsed()) return run_stats(st_corpus, st_split);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace mdseval::cli
