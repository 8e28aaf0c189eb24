// mrkit: dataset curation toolkit for tree-structured NLG corpora.
//
// Subcommands cover the pipeline end to end: import raw files, validate,
// bucket, sample per bucket, augment epoch-wise, filter generator candidates
// by tree accuracy, evaluate experiments, and pick a differentiating eval
// set. Every artifact-writing command also writes a provenance file (inputs,
// config digest, seed, tool version; never timestamps) so outputs are
// byte-reproducible. Errors leave as one JSON object on stderr and a
// nonzero exit; exit 0 means the run's report contains no failures.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mrkit/augment.hpp"
#include "mrkit/bleu.hpp"
#include "mrkit/bucketing.hpp"
#include "mrkit/curation.hpp"
#include "mrkit/dataset.hpp"
#include "mrkit/delex.hpp"
#include "mrkit/domain_config.hpp"
#include "mrkit/errors.hpp"
#include "mrkit/fidelity.hpp"
#include "mrkit/mr.hpp"

namespace {

using nlohmann::ordered_json;
using namespace mrkit;

constexpr const char* kToolVersion = "0.1.0";
constexpr std::uint64_t kDefaultSeed = 1729;
// Reserved concatenation separator; rejected if it occurs in any record.
constexpr const char* kDefaultConcatSep = "⟂";

// Malformed rows in an input data file (as opposed to a config problem).
struct InputError final : Error {
  explicit InputError(const std::string& what) : Error(what) {}
};

const char* error_kind(const std::exception& e) {
  if (dynamic_cast<const SchemaError*>(&e)) return "config";
  if (dynamic_cast<const MappingError*>(&e)) return "mapping";
  if (dynamic_cast<const AggregateParseError*>(&e) ||
      dynamic_cast<const ParseError*>(&e))
    return "parse";
  if (dynamic_cast<const IoError*>(&e)) return "io";
  if (dynamic_cast<const Error*>(&e)) return "data";
  return "internal";
}

int fail(const std::exception& e) {
  ordered_json j;
  j["error"] = error_kind(e);
  j["message"] = e.what();
  std::cerr << j.dump() << "\n";
  return 1;
}

void warn(const std::string& message) {
  ordered_json j;
  j["warning"] = message;
  std::cerr << j.dump() << "\n";
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write: " + path);
  out << text;
}

void write_json(const std::string& path, const ordered_json& j) {
  write_text(path, j.dump(2) + "\n");
}

// One provenance file per main artifact: what went in, which config, which
// seed, what came out. Deliberately no clocks.
void write_provenance(const std::string& artifact, const std::string& command,
                      ordered_json inputs, ordered_json config_digest,
                      std::optional<std::uint64_t> seed,
                      std::vector<std::string> outputs) {
  ordered_json j;
  j["tool"] = "mrkit";
  j["version"] = kToolVersion;
  j["command"] = command;
  j["inputs"] = std::move(inputs);
  j["config_digest"] = std::move(config_digest);
  if (seed) j["seed"] = *seed;
  j["outputs"] = std::move(outputs);
  write_json(artifact + ".provenance.json", j);
}

std::pair<std::string, std::string> parse_kv(const std::string& text,
                                             const char* flag) {
  const std::size_t eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size())
    throw SchemaError(flag, "expected name=value, got \"" + text + "\"");
  return {text.substr(0, eq), text.substr(eq + 1)};
}

void write_concat(const std::string& path,
                  const std::vector<Example>& examples,
                  const std::string& sep) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write: " + path);
  for (const Example& e : examples) {
    if (e.query.find(sep) != std::string::npos ||
        e.scenario.find(sep) != std::string::npos)
      throw SchemaError("concat-sep", "separator occurs in record " + e.id);
    out << e.query << ' ' << sep << ' ' << e.scenario << "\n";
  }
}

ordered_json failures_json(
    const std::vector<std::pair<std::string, std::string>>& failures) {
  ordered_json list = ordered_json::array();
  for (const auto& [id, message] : failures)
    list.push_back(ordered_json{{"id", id}, {"message", message}});
  return list;
}

// ---------------------------------------------------------------------------
// import
// ---------------------------------------------------------------------------

struct ImportOptions {
  std::string in, config, out, report_path;
  std::string mapping = "query=0,scenario=1,reference=2";
  std::string delimiter = "tab";
};

int run_import(const ImportOptions& opt) {
  DomainConfig cfg = load_config(opt.config);
  ColumnMapping mapping = parse_mapping(opt.mapping);
  if (opt.delimiter == "tab")
    mapping.delimiter = '\t';
  else if (opt.delimiter.size() == 1)
    mapping.delimiter = opt.delimiter[0];
  else
    throw SchemaError("delimiter", "expected \"tab\" or a single character");

  ImportResult result = import_raw(opt.in, mapping, cfg);
  save_jsonl(opt.out, result.examples);

  ordered_json report;
  report["domain"] = cfg.name;
  report["imported"] = result.examples.size();
  report["failed"] = result.failures.size();
  report["failures"] = failures_json(result.failures);
  std::cout << report.dump(2) << "\n";
  if (!opt.report_path.empty()) write_json(opt.report_path, report);

  write_provenance(opt.out, "import",
                   ordered_json{{"raw", opt.in},
                                {"config", opt.config},
                                {"mapping", opt.mapping},
                                {"delimiter", opt.delimiter}},
                   config_digest(cfg), std::nullopt, {opt.out});
  if (result.examples.empty() && result.failures.empty())
    warn("input file has no records");
  return result.failures.empty() ? 0 : 1;
}

// ---------------------------------------------------------------------------
// parse (validate + round trip)
// ---------------------------------------------------------------------------

struct ParseOptions {
  std::string in, config, report_path;
};

int run_parse(const ParseOptions& opt) {
  DomainConfig cfg = load_config(opt.config);
  std::vector<Example> examples = load_jsonl(opt.in);
  ValidationReport report = validate_dataset(examples, cfg);

  ordered_json j;
  j["domain"] = cfg.name;
  j["checked"] = report.checked;
  j["failed"] = report.failures.size();
  j["failures"] = failures_json(report.failures);
  std::cout << j.dump(2) << "\n";
  if (!opt.report_path.empty()) {
    write_json(opt.report_path, j);
    write_provenance(opt.report_path, "parse",
                     ordered_json{{"dataset", opt.in}, {"config", opt.config}},
                     config_digest(cfg), std::nullopt, {opt.report_path});
  }
  return report.ok() ? 0 : 1;
}

// ---------------------------------------------------------------------------
// bucket
// ---------------------------------------------------------------------------

struct BucketOptions {
  std::string in, config, granularity = "fb", keys_path, report_path;
};

int run_bucket(const BucketOptions& opt) {
  DomainConfig cfg = load_config(opt.config);
  std::vector<Example> examples = load_jsonl(opt.in);
  const Granularity g = granularity_from_name(to_lower_ascii(opt.granularity));

  ordered_json counts;
  for (Granularity each : {Granularity::CB, Granularity::MB, Granularity::FB,
                           Granularity::FBQ})
    counts[granularity_name(each)] = partition(examples, cfg, each).size();

  const auto buckets = partition(examples, cfg, g);
  std::map<std::size_t, std::size_t> histogram;
  for (const auto& [key, ids] : buckets) ++histogram[ids.size()];

  ordered_json report;
  report["domain"] = cfg.name;
  report["examples"] = examples.size();
  report["bucket_counts"] = counts;
  report["granularity"] = granularity_name(g);
  ordered_json hist;
  for (const auto& [size, n] : histogram) hist[std::to_string(size)] = n;
  report["size_histogram"] = hist;
  std::cout << report.dump(2) << "\n";
  if (!opt.report_path.empty()) write_json(opt.report_path, report);

  if (!opt.keys_path.empty()) {
    std::ostringstream lines;
    for (const Example& e : examples) {
      ordered_json line;
      line["id"] = e.id;
      line["key"] = bucket_key(e, cfg, g).key;
      lines << line.dump() << "\n";
    }
    write_text(opt.keys_path, lines.str());
    write_provenance(opt.keys_path, "bucket",
                     ordered_json{{"dataset", opt.in},
                                  {"config", opt.config},
                                  {"granularity", granularity_name(g)}},
                     config_digest(cfg), std::nullopt, {opt.keys_path});
  }
  return 0;
}

// ---------------------------------------------------------------------------
// sample
// ---------------------------------------------------------------------------

struct SampleOptions {
  std::vector<std::string> sampled;  // domain=path, drawn per bucket
  std::vector<std::string> full;     // domain=path, merged whole
  std::vector<std::string> configs;  // domain=path
  std::string plan_text;
  std::string granularity = "fb";
  std::uint64_t per_bucket = 0;
  double fraction = 0.0;
  std::uint64_t seed = kDefaultSeed;
  std::string out, report_path, concat_out;
  std::string concat_sep = kDefaultConcatSep;
};

SamplePlan resolve_plan(const SampleOptions& opt) {
  if (!opt.plan_text.empty()) {
    static const std::regex shorthand("([0-9]+)per(cb|mb|fb|fbq)",
                                      std::regex::icase);
    std::smatch m;
    if (std::regex_match(opt.plan_text, m, shorthand)) {
      SamplePlan plan;
      plan.granularity = granularity_from_name(to_lower_ascii(m[2].str()));
      plan.per_bucket = std::stoull(m[1].str());
      plan.seed = opt.seed;
      return plan;
    }
    std::ifstream in(opt.plan_text);
    if (!in)
      throw SchemaError("plan", "neither <n>Per<granularity> shorthand nor a "
                                "readable plan file: " + opt.plan_text);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError("plan", std::string("invalid plan JSON: ") + e.what());
    }
    SamplePlan plan = plan_from_json(j);
    plan.seed = opt.seed;
    return plan;
  }
  SamplePlan plan;
  plan.granularity = granularity_from_name(to_lower_ascii(opt.granularity));
  if (opt.per_bucket > 0) plan.per_bucket = opt.per_bucket;
  if (opt.fraction > 0.0) plan.bucket_fraction = opt.fraction;
  plan.seed = opt.seed;
  if (!plan.valid())
    throw SchemaError("plan",
                      "need exactly one of --per-bucket or --fraction");
  return plan;
}

int run_sample(const SampleOptions& opt) {
  const SamplePlan plan = resolve_plan(opt);

  std::map<std::string, std::string> config_paths;
  for (const std::string& kv : opt.configs)
    config_paths.insert(parse_kv(kv, "config"));

  std::set<std::string> seen_domains;
  std::vector<std::pair<std::string, std::vector<Example>>> sources;
  ordered_json source_report = ordered_json::array();
  ordered_json digests;

  for (const std::string& kv : opt.sampled) {
    const auto [domain, path] = parse_kv(kv, "in");
    if (!seen_domains.insert(domain).second)
      throw SchemaError("in", "domain listed twice: " + domain);
    auto cfg_it = config_paths.find(domain);
    if (cfg_it == config_paths.end())
      throw SchemaError("config", "no config given for domain " + domain);
    DomainConfig cfg = load_config(cfg_it->second);
    digests[domain] = config_digest(cfg);

    std::vector<Example> full = load_jsonl(path);
    std::vector<Example> picked = sample(full, cfg, plan);
    source_report.push_back(
        ordered_json{{"domain", domain},
                     {"mode", "sampled"},
                     {"full", full.size()},
                     {"sampled", picked.size()},
                     {"data_reduction",
                      data_reduction(full.size(), picked.size())}});
    sources.emplace_back(domain, std::move(picked));
  }
  for (const std::string& kv : opt.full) {
    const auto [domain, path] = parse_kv(kv, "in-full");
    if (!seen_domains.insert(domain).second)
      throw SchemaError("in-full", "domain listed twice: " + domain);
    std::vector<Example> whole = load_jsonl(path);
    auto cfg_it = config_paths.find(domain);
    if (cfg_it != config_paths.end()) {
      DomainConfig cfg = load_config(cfg_it->second);
      digests[domain] = config_digest(cfg);
      require_valid(whole, cfg);
    }
    source_report.push_back(ordered_json{
        {"domain", domain}, {"mode", "full"}, {"count", whole.size()}});
    sources.emplace_back(domain, std::move(whole));
  }
  if (sources.empty()) throw SchemaError("in", "no input datasets given");

  // A single source keeps its ids; several are namespaced by domain.
  std::vector<Example> merged = sources.size() == 1
                                    ? std::move(sources.front().second)
                                    : merge(sources);
  save_jsonl(opt.out, merged);
  if (!opt.concat_out.empty())
    write_concat(opt.concat_out, merged, opt.concat_sep);

  ordered_json report;
  report["seed"] = plan.seed;
  report["plan"] = plan_to_json(plan);
  report["sources"] = source_report;
  report["total"] = merged.size();
  std::cout << report.dump(2) << "\n";
  if (!opt.report_path.empty()) write_json(opt.report_path, report);

  std::vector<std::string> outputs{opt.out};
  if (!opt.concat_out.empty()) outputs.push_back(opt.concat_out);
  write_provenance(opt.out, "sample",
                   ordered_json{{"sampled", opt.sampled},
                                {"full", opt.full},
                                {"plan", plan_to_json(plan)}},
                   digests, plan.seed, outputs);
  return 0;
}

// ---------------------------------------------------------------------------
// augment
// ---------------------------------------------------------------------------

struct AugmentOptions {
  std::string in, config, out, report_path, concat_out;
  std::string concat_sep = kDefaultConcatSep;
  std::uint64_t epochs = 0;
  std::uint64_t materialize = 0;
  std::uint64_t seed = kDefaultSeed;
  bool per_instance = false;
};

int run_augment(const AugmentOptions& opt) {
  if ((opt.epochs == 0) == (opt.materialize == 0))
    throw SchemaError("epochs",
                      "need exactly one of --epochs or --materialize");
  DomainConfig cfg = load_config(opt.config);
  std::vector<Example> examples = load_jsonl(opt.in);
  for (const Example& e : examples)
    if (e.domain != cfg.name)
      throw InputError("example " + e.id + " has domain " + e.domain +
                       " but the config is for " + cfg.name +
                       "; augment one domain at a time");
  require_valid(examples, cfg);

  std::vector<DelexExample> source;
  source.reserve(examples.size());
  for (const Example& e : examples) source.push_back(delexicalize(e, cfg));

  std::optional<std::uint64_t> epochs;
  if (opt.epochs > 0) epochs = opt.epochs;
  AugmentStream stream(std::move(source), cfg, opt.seed, epochs,
                       opt.per_instance);

  std::ostringstream lines;
  std::vector<Example> emitted;
  while (auto instance = stream.next()) {
    if (opt.materialize > 0) {
      Example e = std::move(instance->example);
      e.id += "@e" + std::to_string(instance->epoch);
      e.origin = "synthetic";
      lines << example_to_json(e).dump() << "\n";
      emitted.push_back(std::move(e));
      if (emitted.size() == opt.materialize) break;
    } else {
      ordered_json line;
      line["epoch"] = instance->epoch;
      const ordered_json fields = example_to_json(instance->example);
      for (const auto& [key, value] : fields.items()) line[key] = value;
      lines << line.dump() << "\n";
      emitted.push_back(std::move(instance->example));
    }
  }
  write_text(opt.out, lines.str());
  if (!opt.concat_out.empty())
    write_concat(opt.concat_out, emitted, opt.concat_sep);

  ordered_json report;
  report["seed"] = opt.seed;
  if (opt.epochs > 0)
    report["epochs"] = opt.epochs;
  else
    report["materialize"] = opt.materialize;
  report["per_instance"] = opt.per_instance;
  report["emitted"] = emitted.size();
  report["inflected_reference_ids"] = stream.report().inflected_reference_ids;
  std::cout << report.dump(2) << "\n";
  if (!opt.report_path.empty()) write_json(opt.report_path, report);

  std::vector<std::string> outputs{opt.out};
  if (!opt.concat_out.empty()) outputs.push_back(opt.concat_out);
  write_provenance(opt.out, "augment",
                   ordered_json{{"dataset", opt.in}, {"config", opt.config}},
                   config_digest(cfg), opt.seed, outputs);
  return 0;
}

// ---------------------------------------------------------------------------
// kd-filter
// ---------------------------------------------------------------------------

struct KdOptions {
  std::string in, candidates, config, out, report_path;
  std::string mode = "strict";
  bool require_indices = false;
};

TreeAccuracyMode mode_from_name(const std::string& name) {
  if (name == "strict") return TreeAccuracyMode::Strict;
  if (name == "lenient") return TreeAccuracyMode::Lenient;
  throw SchemaError("mode", "expected strict or lenient");
}

// Ranked candidates: one JSON object per line, file order is generator rank.
std::map<std::string, std::vector<std::string>> load_ranked_candidates(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open candidates: " + path);
  std::map<std::string, std::vector<std::string>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw InputError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("example_id") ||
        !j["example_id"].is_string() || !j.contains("candidate") ||
        !j["candidate"].is_string())
      throw InputError(path + ":" + std::to_string(lineno) +
                       ": need string fields example_id and candidate");
    out[j["example_id"].get<std::string>()].push_back(
        j["candidate"].get<std::string>());
  }
  return out;
}

int run_kd_filter(const KdOptions& opt) {
  DomainConfig cfg = load_config(opt.config);
  const TreeAccuracyMode mode = mode_from_name(opt.mode);
  std::vector<Example> scenarios = load_jsonl(opt.in);
  require_valid(scenarios, cfg);
  auto ranked = load_ranked_candidates(opt.candidates);

  std::set<std::string> known;
  for (const Example& e : scenarios) known.insert(e.id);
  for (const auto& [id, list] : ranked)
    if (!known.count(id))
      throw InputError(opt.candidates + ": unknown example id: " + id);

  std::vector<Example> kept;
  std::size_t no_candidates = 0, all_fail = 0;
  std::map<std::size_t, std::size_t> rank_histogram;
  for (const Example& e : scenarios) {
    auto it = ranked.find(e.id);
    if (it == ranked.end() || it->second.empty()) {
      ++no_candidates;
      continue;
    }
    const MrForest scenario = parse(e.scenario, cfg.vocab);
    auto hit = kd_filter(scenario, it->second, cfg, mode, opt.require_indices);
    if (!hit) {
      ++all_fail;
      continue;
    }
    ++rank_histogram[hit->first];
    Example out = e;
    out.reference = hit->second;
    out.origin = "synthetic";
    kept.push_back(std::move(out));
  }
  save_jsonl(opt.out, kept);

  ordered_json report;
  report["mode"] = opt.mode;
  report["require_indices"] = opt.require_indices;
  report["scenarios"] = scenarios.size();
  report["kept"] = kept.size();
  report["dropped_all_fail"] = all_fail;
  report["dropped_no_candidates"] = no_candidates;
  ordered_json hist;
  for (const auto& [rank, n] : rank_histogram) hist[std::to_string(rank)] = n;
  report["picked_rank_histogram"] = hist;
  std::cout << report.dump(2) << "\n";
  if (!opt.report_path.empty()) write_json(opt.report_path, report);

  write_provenance(opt.out, "kd-filter",
                   ordered_json{{"scenarios", opt.in},
                                {"candidates", opt.candidates},
                                {"config", opt.config},
                                {"mode", opt.mode}},
                   config_digest(cfg), std::nullopt, {opt.out});
  return 0;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

struct EvalOptions {
  std::string test, config, out, mode = "strict";
  std::vector<std::string> candidates;    // experiment=path, repeats = runs
  std::vector<std::string> train_counts;  // experiment=full,sampled
  bool require_indices = false;
  bool keep_structure = false;
};

std::map<std::string, std::string> load_single_candidates(
    const std::string& path) {
  std::map<std::string, std::string> out;
  for (const auto& [id, list] : load_ranked_candidates(path)) {
    if (list.size() > 1)
      throw InputError(path + ": several candidates for example " + id);
    out[id] = list.front();
  }
  return out;
}

struct RunOutcome {
  RunReport report;
  std::optional<double> bleu;
  std::map<std::string, bool> passes;
};

int run_eval(const EvalOptions& opt) {
  DomainConfig cfg = load_config(opt.config);
  const TreeAccuracyMode mode = mode_from_name(opt.mode);
  std::vector<Example> test = load_jsonl(opt.test);
  require_valid(test, cfg);
  if (test.empty()) throw EmptyDataset();

  std::map<std::string, std::vector<std::string>> run_paths;  // keeps order
  std::vector<std::string> experiment_order;
  for (const std::string& kv : opt.candidates) {
    const auto [name, path] = parse_kv(kv, "candidates");
    if (!run_paths.count(name)) experiment_order.push_back(name);
    run_paths[name].push_back(path);
  }
  if (experiment_order.empty())
    throw SchemaError("candidates", "no candidate files given");

  std::map<std::string, double> reductions;
  for (const std::string& kv : opt.train_counts) {
    const auto [name, counts] = parse_kv(kv, "train-counts");
    const std::size_t comma = counts.find(',');
    if (comma == std::string::npos)
      throw SchemaError("train-counts", "expected name=full,sampled");
    reductions[name] = data_reduction(std::stoull(counts.substr(0, comma)),
                                      std::stoull(counts.substr(comma + 1)));
  }

  std::map<std::string, MrForest> parsed;
  for (const Example& e : test) parsed[e.id] = parse(e.scenario, cfg.vocab);

  auto evaluate_run = [&](const std::string& experiment,
                          const std::string& path) {
    auto candidates = load_single_candidates(path);
    std::vector<std::string> missing;
    for (const Example& e : test)
      if (!candidates.count(e.id)) missing.push_back(e.id);
    if (!missing.empty()) throw MissingCandidates(std::move(missing));
    for (const auto& [id, text] : candidates)
      if (!parsed.count(id))
        throw InputError(path + ": candidate for unknown example " + id);

    RunOutcome outcome;
    std::vector<EvalRecord> records;
    std::vector<TokenizedPair> bleu_pairs;
    for (const Example& e : test) {
      EvalRecord record;
      record.example_id = e.id;
      record.experiment_id = experiment;
      record.candidate_text = candidates.at(e.id);
      TreeCheck check = check_tree(parsed.at(e.id), record.candidate_text, cfg,
                                   mode, opt.require_indices);
      record.tree_pass = check.pass;
      record.failure_reason = check.reason;
      outcome.passes[e.id] = check.pass;
      if (e.reference)
        bleu_pairs.emplace_back(
            bleu_tokens(record.candidate_text, opt.keep_structure),
            bleu_tokens(*e.reference, opt.keep_structure));
      records.push_back(std::move(record));
    }
    outcome.report = aggregate(records);
    if (!bleu_pairs.empty()) outcome.bleu = corpus_bleu(bleu_pairs);
    return outcome;
  };

  ordered_json experiments;
  PassMatrix matrix;
  struct Row {
    std::string name;
    std::optional<double> bleu;
    double accuracy;
    std::optional<double> reduction;
    std::optional<double> stdev;
  };
  std::vector<Row> rows;
  for (const std::string& name : experiment_order) {
    std::vector<RunOutcome> outcomes;
    for (const std::string& path : run_paths[name])
      outcomes.push_back(evaluate_run(name, path));

    std::size_t best = 0;
    std::vector<RunReport> reports;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      reports.push_back(outcomes[i].report);
      if (outcomes[i].report.tree_accuracy >
          outcomes[best].report.tree_accuracy)
        best = i;
    }
    Row row;
    row.name = name;
    row.bleu = outcomes[best].bleu;
    row.accuracy = outcomes[best].report.tree_accuracy;
    if (outcomes.size() >= 2) row.stdev = robustness(reports).second;
    if (auto it = reductions.find(name); it != reductions.end())
      row.reduction = it->second;
    rows.push_back(row);

    for (const auto& [id, pass] : outcomes[best].passes)
      matrix[id][name] = pass;

    ordered_json runs = ordered_json::array();
    for (const RunOutcome& o : outcomes)
      runs.push_back(ordered_json{
          {"tree_accuracy", o.report.tree_accuracy},
          {"bleu", o.bleu ? ordered_json(*o.bleu) : ordered_json(nullptr)},
          {"n_examples", o.report.n_examples}});
    ordered_json ej;
    ej["runs"] = runs;
    ej["tree_accuracy"] = row.accuracy;
    ej["bleu"] = row.bleu ? ordered_json(*row.bleu) : ordered_json(nullptr);
    ej["treeacc_stdev"] =
        row.stdev ? ordered_json(*row.stdev) : ordered_json(nullptr);
    ej["data_reduction"] =
        row.reduction ? ordered_json(*row.reduction) : ordered_json(nullptr);
    experiments[name] = ej;
  }

  ordered_json pass_matrix;
  for (const auto& [id, by_experiment] : matrix) {
    ordered_json inner;
    for (const auto& [name, pass] : by_experiment) inner[name] = pass;
    pass_matrix[id] = inner;
  }

  ordered_json report;
  report["mode"] = opt.mode;
  report["test_size"] = test.size();
  report["experiments"] = experiments;
  report["pass_matrix"] = pass_matrix;
  if (!opt.out.empty()) {
    write_json(opt.out, report);
    write_provenance(opt.out, "eval",
                     ordered_json{{"test", opt.test},
                                  {"config", opt.config},
                                  {"candidates", opt.candidates},
                                  {"mode", opt.mode}},
                     config_digest(cfg), std::nullopt, {opt.out});
  }

  auto cell = [](std::optional<double> v, int precision) {
    if (!v) return std::string("-");
    std::ostringstream s;
    s << std::fixed << std::setprecision(precision) << *v;
    return s.str();
  };
  std::size_t name_width = std::string("Experiment").size();
  for (const Row& row : rows) name_width = std::max(name_width, row.name.size());
  std::cout << std::left << std::setw(static_cast<int>(name_width) + 2)
            << "Experiment" << std::right << std::setw(12) << "BLEU Score"
            << std::setw(15) << "Tree Accuracy" << std::setw(16)
            << "Data Reduction" << std::setw(15) << "TreeAcc STDev" << "\n";
  for (const Row& row : rows)
    std::cout << std::left << std::setw(static_cast<int>(name_width) + 2)
              << row.name << std::right << std::setw(12) << cell(row.bleu, 4)
              << std::setw(15) << cell(row.accuracy, 1) << std::setw(16)
              << cell(row.reduction, 1) << std::setw(15) << cell(row.stdev, 2)
              << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// select-eval-set
// ---------------------------------------------------------------------------

struct SelectOptions {
  std::string test, config, passes, out, report_path;
  std::uint64_t k = 150;
};

int run_select(const SelectOptions& opt) {
  DomainConfig cfg = load_config(opt.config);
  std::vector<Example> test = load_jsonl(opt.test);

  std::ifstream in(opt.passes);
  if (!in) throw IoError("cannot open pass matrix: " + opt.passes);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("passes", std::string("invalid JSON: ") + e.what());
  }
  // Accepts a bare matrix or a whole eval report.
  const nlohmann::json& m = j.contains("pass_matrix") ? j["pass_matrix"] : j;
  if (!m.is_object()) throw SchemaError("passes", "expected a JSON object");
  PassMatrix matrix;
  for (const auto& [id, inner] : m.items()) {
    if (!inner.is_object())
      throw SchemaError("passes", "matrix rows must be objects");
    for (const auto& [experiment, pass] : inner.items()) {
      if (!pass.is_boolean())
        throw SchemaError("passes", "matrix cells must be booleans");
      matrix[id][experiment] = pass.get<bool>();
    }
  }

  std::vector<std::string> selected =
      select_differentiating(test, matrix, cfg, opt.k);

  ordered_json report;
  report["k"] = opt.k;
  report["selected"] = selected;
  std::cout << report.dump(2) << "\n";
  if (!opt.out.empty()) {
    write_json(opt.out, report);
    write_provenance(opt.out, "select-eval-set",
                     ordered_json{{"test", opt.test},
                                  {"config", opt.config},
                                  {"passes", opt.passes}},
                     config_digest(cfg), std::nullopt, {opt.out});
  }
  if (!opt.report_path.empty()) write_json(opt.report_path, report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dataset curation toolkit for tree-structured NLG corpora"};
  app.set_version_flag("--version", std::string("mrkit ") + kToolVersion);
  app.require_subcommand(1);

  ImportOptions import_opt;
  CLI::App* cmd_import =
      app.add_subcommand("import", "convert a raw delimited file to JSONL");
  cmd_import->add_option("--in", import_opt.in, "raw input file")->required();
  cmd_import->add_option("--config", import_opt.config, "domain config JSON")
      ->required();
  cmd_import->add_option("--mapping", import_opt.mapping,
                         "column mapping, e.g. query=0,scenario=1,reference=2");
  cmd_import->add_option("--delimiter", import_opt.delimiter,
                         "\"tab\" or a single character");
  cmd_import->add_option("--out", import_opt.out, "output JSONL")->required();
  cmd_import->add_option("--report", import_opt.report_path,
                         "write the import report JSON here");

  ParseOptions parse_opt;
  CLI::App* cmd_parse = app.add_subcommand(
      "parse", "validate a dataset: scenarios parse and round-trip");
  cmd_parse->add_option("--in", parse_opt.in, "dataset JSONL")->required();
  cmd_parse->add_option("--config", parse_opt.config, "domain config JSON")
      ->required();
  cmd_parse->add_option("--report", parse_opt.report_path,
                        "write the validation report JSON here");

  BucketOptions bucket_opt;
  CLI::App* cmd_bucket =
      app.add_subcommand("bucket", "partition a dataset into buckets");
  cmd_bucket->add_option("--in", bucket_opt.in, "dataset JSONL")->required();
  cmd_bucket->add_option("--config", bucket_opt.config, "domain config JSON")
      ->required();
  cmd_bucket->add_option("--granularity", bucket_opt.granularity,
                         "cb, mb, fb or fbq (default fb)");
  cmd_bucket->add_option("--keys", bucket_opt.keys_path,
                         "write the id -> bucket key JSONL here");
  cmd_bucket->add_option("--report", bucket_opt.report_path,
                         "write the bucket report JSON here");

  SampleOptions sample_opt;
  CLI::App* cmd_sample = app.add_subcommand(
      "sample", "draw per-bucket samples and merge training sets");
  cmd_sample->add_option("--in", sample_opt.sampled,
                         "domain=path dataset to sample (repeatable)");
  cmd_sample->add_option("--in-full", sample_opt.full,
                         "domain=path dataset merged whole (repeatable)");
  cmd_sample->add_option("--config", sample_opt.configs,
                         "domain=path config (repeatable)");
  CLI::Option* plan_opt = cmd_sample->add_option(
      "--plan", sample_opt.plan_text,
      "plan shorthand like 1PerFB, or a plan JSON file");
  CLI::Option* per_bucket_opt = cmd_sample->add_option(
      "--per-bucket", sample_opt.per_bucket, "examples drawn per bucket");
  CLI::Option* fraction_opt = cmd_sample->add_option(
      "--fraction", sample_opt.fraction, "fraction of buckets to draw from");
  CLI::Option* granularity_opt = cmd_sample->add_option(
      "--granularity", sample_opt.granularity, "cb, mb, fb or fbq");
  plan_opt->excludes(per_bucket_opt)
      ->excludes(fraction_opt)
      ->excludes(granularity_opt);
  cmd_sample->add_option("--seed", sample_opt.seed,
                         "sampling seed (default 1729)");
  cmd_sample->add_option("--out", sample_opt.out, "merged output JSONL")
      ->required();
  cmd_sample->add_option("--report", sample_opt.report_path,
                         "write the sampling report JSON here");
  cmd_sample->add_option("--concat-out", sample_opt.concat_out,
                         "also write query/scenario concatenation lines here");
  cmd_sample->add_option("--concat-sep", sample_opt.concat_sep,
                         "concatenation separator token");

  AugmentOptions augment_opt;
  CLI::App* cmd_augment = app.add_subcommand(
      "augment", "emit epoch-wise re-lexicalized training instances");
  cmd_augment->add_option("--in", augment_opt.in, "dataset JSONL")->required();
  cmd_augment->add_option("--config", augment_opt.config, "domain config JSON")
      ->required();
  cmd_augment->add_option("--epochs", augment_opt.epochs,
                          "emit one instance per example per epoch");
  cmd_augment->add_option("--materialize", augment_opt.materialize,
                          "emit exactly this many instances as a dataset");
  cmd_augment->add_option("--seed", augment_opt.seed,
                          "draw seed (default 1729)");
  cmd_augment->add_flag("--per-instance", augment_opt.per_instance,
                        "fresh draws for repeated ids within an epoch");
  cmd_augment->add_option("--out", augment_opt.out, "output JSONL")
      ->required();
  cmd_augment->add_option("--report", augment_opt.report_path,
                          "write the augmentation report JSON here");
  cmd_augment->add_option("--concat-out", augment_opt.concat_out,
                          "also write query/scenario concatenation lines here");
  cmd_augment->add_option("--concat-sep", augment_opt.concat_sep,
                          "concatenation separator token");

  KdOptions kd_opt;
  CLI::App* cmd_kd = app.add_subcommand(
      "kd-filter", "keep the first candidate passing the tree check");
  cmd_kd->add_option("--in", kd_opt.in, "scenario dataset JSONL")->required();
  cmd_kd->add_option("--candidates", kd_opt.candidates,
                     "ranked candidate JSONL (example_id, candidate)")
      ->required();
  cmd_kd->add_option("--config", kd_opt.config, "domain config JSON")
      ->required();
  cmd_kd->add_option("--mode", kd_opt.mode, "strict or lenient");
  cmd_kd->add_flag("--require-indices", kd_opt.require_indices,
                   "compare act indices too");
  cmd_kd->add_option("--out", kd_opt.out, "synthetic dataset JSONL")
      ->required();
  cmd_kd->add_option("--report", kd_opt.report_path,
                     "write the filter report JSON here");

  EvalOptions eval_opt;
  CLI::App* cmd_eval = app.add_subcommand(
      "eval", "score experiment candidates against a test set");
  cmd_eval->add_option("--test", eval_opt.test, "test dataset JSONL")
      ->required();
  cmd_eval->add_option("--config", eval_opt.config, "domain config JSON")
      ->required();
  cmd_eval
      ->add_option("--candidates", eval_opt.candidates,
                   "experiment=path candidate JSONL; repeat a name for "
                   "multiple runs")
      ->required();
  cmd_eval->add_option("--mode", eval_opt.mode, "strict or lenient");
  cmd_eval->add_flag("--require-indices", eval_opt.require_indices,
                     "compare act indices too");
  cmd_eval->add_flag("--keep-structure", eval_opt.keep_structure,
                     "score BLEU on bracketed text");
  cmd_eval->add_option("--train-counts", eval_opt.train_counts,
                       "experiment=full,sampled training sizes for the data "
                       "reduction column");
  cmd_eval->add_option("--out", eval_opt.out, "write the eval report JSON here");

  SelectOptions select_opt;
  CLI::App* cmd_select = app.add_subcommand(
      "select-eval-set", "pick the most differentiating examples per bucket");
  cmd_select->add_option("--test", select_opt.test, "test dataset JSONL")
      ->required();
  cmd_select->add_option("--config", select_opt.config, "domain config JSON")
      ->required();
  cmd_select
      ->add_option("--passes", select_opt.passes,
                   "pass matrix JSON, or an eval report containing one")
      ->required();
  cmd_select->add_option("--k", select_opt.k, "how many examples (default 150)");
  cmd_select->add_option("--out", select_opt.out, "write the selection here");
  cmd_select->add_option("--report", select_opt.report_path,
                         "write the selection report JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help, --version
    ordered_json j;
    j["error"] = "usage";
    j["message"] = e.what();
    std::cerr << j.dump() << "\n";
    return e.get_exit_code();
  }

  try {
    if (*cmd_import) return run_import(import_opt);
    if (*cmd_parse) return run_parse(parse_opt);
    if (*cmd_bucket) return run_bucket(bucket_opt);
    if (*cmd_sample) return run_sample(sample_opt);
    if (*cmd_augment) return run_augment(augment_opt);
    if (*cmd_kd) return run_kd_filter(kd_opt);
    if (*cmd_eval) return run_eval(eval_opt);
    if (*cmd_select) return run_select(select_opt);
  } catch (const std::exception& e) {
    return fail(e);
  }
  return 0;
}
