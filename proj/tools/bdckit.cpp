// bdckit command line: the pipeline stages as subcommands over JSON Lines
// record files. Every run echoes its effective config into the output
// directory and writes a manifest with input digests; a rerun whose
// command, parameters, and inputs all match a completed manifest is
// skipped. Exit codes: 0 success, 1 domain failure (rejected models,
// partial item failures), 2 usage or infrastructure failure.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bdc/backend.hpp"
#include "bdc/benchmark.hpp"
#include "bdc/detection.hpp"
#include "bdc/errors.hpp"
#include "bdc/eval_vector.hpp"
#include "bdc/harness.hpp"
#include "bdc/mitigation.hpp"
#include "bdc/openai_client.hpp"
#include "bdc/records.hpp"
#include "bdc/report.hpp"
#include "bdc/rng.hpp"
#include "bdc/simulator.hpp"
#include "bdc/strategy.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw bdc::ConfigError("cannot open file: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void spill(const fs::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw bdc::ConfigError("cannot write file: " + path.string());
  os << content;
  os.flush();
  if (!os) throw bdc::ConfigError("write failed: " + path.string());
}

std::string digest_hex(const std::string& bytes) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(bdc::fnv1a64(bytes)));
  return buf;
}

std::string trim_copy(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// default benchmark id: the input file name without its extension
std::string id_or_stem(const std::string& id, const std::string& path) {
  return id.empty() ? fs::path(path).stem().string() : id;
}

bdc::GenerationClient endpoint_client(const std::string& endpoint, const std::string& model,
                                      const std::string& api_key_env) {
  bdc::GenerationClient c;
  c.endpoint = endpoint;
  c.model_name = model;
  if (!api_key_env.empty()) {
    const char* v = std::getenv(api_key_env.c_str());
    if (v == nullptr) throw bdc::ConfigError("environment variable not set: " + api_key_env);
    c.api_key = v;
  }
  return c;
}

// ---- config file ----------------------------------------------------

// One flat JSON object; command line flags override its values. Keys are
// the long option names with underscores (documented in docs/formats.md).
struct ConfigFile {
  json doc = json::object();

  void load(const std::string& path) {
    json j = json::parse(slurp(path), nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw bdc::ConfigError("config file must hold a JSON object: " + path);
    doc = std::move(j);
  }

  template <typename T>
  void fill(const CLI::App& cmd, const std::string& flag, const std::string& key, T& var) const {
    if (cmd.count(flag) > 0) return;
    auto it = doc.find(key);
    if (it == doc.end()) return;
    try {
      var = it->get<T>();
    } catch (const json::exception&) {
      throw bdc::ConfigError("config key has the wrong type: " + key);
    }
  }
};

// ---- run bookkeeping --------------------------------------------------

// Owns the output directory: collects input digests and output names, and
// decides whether a previous completed run already covers this one.
class RunContext {
 public:
  RunContext(std::string command, const std::string& out_dir)
      : command_(std::move(command)), out_(out_dir) {
    if (out_dir.empty()) throw bdc::ConfigError("--out directory is required");
    fs::create_directories(out_);
  }

  json params = json::object();
  json result = json::object();

  void add_input(const std::string& path, const std::string& bytes) {
    inputs_[path] = digest_hex(bytes);
  }

  // True when the stored manifest is complete, matches this command, its
  // parameters and input digests, and every listed output still exists.
  bool up_to_date(int& exit_code) const {
    std::ifstream is(out_ / "manifest.json");
    if (!is) return false;
    json m = json::parse(is, nullptr, false);
    if (m.is_discarded() || !m.is_object()) return false;
    if (!m.value("complete", false)) return false;
    if (m.value("command", std::string()) != command_) return false;
    if (!m.contains("params") || m["params"] != params) return false;
    if (!m.contains("inputs") || m["inputs"] != inputs_) return false;
    if (!m.contains("outputs") || !m["outputs"].is_array()) return false;
    for (const auto& f : m["outputs"])
      if (!f.is_string() || !fs::exists(out_ / f.get<std::string>())) return false;
    exit_code = 0;
    if (m.contains("result") && m["result"].is_object())
      exit_code = m["result"].value("exit_code", 0);
    std::cout << "up-to-date\n";
    return true;
  }

  void write_output(const std::string& name, const std::string& content) {
    spill(out_ / name, content);
    if (std::find(outputs_.begin(), outputs_.end(), name) == outputs_.end())
      outputs_.push_back(name);
  }

  int finalize(int exit_code) {
    result["exit_code"] = exit_code;
    spill(out_ / "effective_config.json", params.dump(2) + "\n");
    json m{{"command", command_}, {"complete", true},   {"inputs", inputs_},
           {"outputs", outputs_}, {"params", params},   {"result", result}};
    spill(out_ / "manifest.json", m.dump(2) + "\n");
    return exit_code;
  }

 private:
  std::string command_;
  fs::path out_;
  json inputs_ = json::object();
  std::vector<std::string> outputs_;
};

// ---- detect -----------------------------------------------------------

struct DetectArgs {
  std::string config, out;
  std::string scores;  // precomputed score records; empty = probe a live endpoint
  std::string benchmark, benchmark_id;
  std::string endpoint, api_key_env, model, model_id;
  double k_percent = 20.0;
  double min_k_threshold = 0.0;
  bool have_min_k_threshold = false;
  std::size_t shards = 5;
  std::size_t permutations = 10;
  double rouge_threshold = 0.4;
  double p_threshold = 0.05;
  std::uint64_t seed = 1;
};

int run_detect(const DetectArgs& a) {
  RunContext ctx("detect", a.out);
  std::vector<bdc::records::VerdictRecord> verdict_records;
  std::map<std::string, std::vector<bdc::detect::DetectionVerdict>> per_model;

  if (!a.scores.empty()) {
    std::string bytes = slurp(a.scores);
    ctx.add_input(a.scores, bytes);
    ctx.params = {{"mode", "scores"}, {"scores", a.scores}};
    if (int rc = 0; ctx.up_to_date(rc)) return rc;

    std::istringstream is(bytes);
    auto rows = bdc::records::read_scores(is);
    if (rows.empty()) throw bdc::EmptyInput("no score records in " + a.scores);
    for (const auto& r : rows) {
      bdc::detect::DetectionVerdict v;
      switch (bdc::detect::method_from_string(r.method)) {
        case bdc::detect::Method::MinK:
          v = bdc::detect::min_k_verdict_from_score(r.score, r.threshold);
          break;
        case bdc::detect::Method::ShardedRank:
          v = bdc::detect::sharded_rank_verdict_from_p(r.score, r.threshold);
          break;
        case bdc::detect::Method::TSGuessing:
          v = bdc::detect::ts_guessing_verdict_from_score(r.score, r.threshold);
          break;
      }
      verdict_records.push_back(bdc::records::make_verdict_record(v, r.model_id, r.benchmark_id));
      per_model[r.model_id].push_back(v);
    }
  } else {
    if (a.endpoint.empty() || a.benchmark.empty())
      throw bdc::ConfigError("detect needs --scores, or --benchmark with --endpoint");
    if (!a.have_min_k_threshold)
      throw bdc::ConfigError("live detection needs --min-k-threshold");
    std::string bytes = slurp(a.benchmark);
    ctx.add_input(a.benchmark, bytes);
    std::string bench_id = id_or_stem(a.benchmark_id, a.benchmark);
    std::string model_label = a.model_id.empty() ? a.model : a.model_id;
    ctx.params = {{"mode", "live"},
                  {"benchmark", a.benchmark},
                  {"benchmark_id", bench_id},
                  {"endpoint", a.endpoint},
                  {"api_key_env", a.api_key_env},
                  {"model", a.model},
                  {"model_id", model_label},
                  {"k_percent", a.k_percent},
                  {"min_k_threshold", a.min_k_threshold},
                  {"shards", a.shards},
                  {"permutations", a.permutations},
                  {"rouge_threshold", a.rouge_threshold},
                  {"p_threshold", a.p_threshold},
                  {"seed", a.seed}};
    if (int rc = 0; ctx.up_to_date(rc)) return rc;

    std::istringstream is(bytes);
    bdc::Benchmark bench = bdc::records::read_benchmark(is, bench_id);
    bdc::OpenAIClient backend(endpoint_client(a.endpoint, a.model, a.api_key_env));

    std::vector<bdc::detect::DetectionVerdict> vs;
    auto example_scores = bdc::harness::min_k_example_scores(backend, bench, a.k_percent);
    vs.push_back(bdc::detect::min_k_verdict(example_scores, a.min_k_threshold));
    auto shards =
        bdc::harness::sharded_likelihoods(backend, bench, a.shards, a.permutations, a.seed);
    vs.push_back(bdc::detect::sharded_rank_verdict(shards, a.p_threshold));
    bool any_mc = std::any_of(bench.items.begin(), bench.items.end(), [](const auto& it) {
      return it.question_type == bdc::QuestionType::MultipleChoice;
    });
    if (any_mc) {
      auto guesses = bdc::harness::ts_guess_items(backend, bench);
      vs.push_back(bdc::detect::ts_guessing_verdict(guesses, a.rouge_threshold));
    }
    for (const auto& v : vs) {
      verdict_records.push_back(bdc::records::make_verdict_record(v, model_label, bench_id));
      per_model[model_label].push_back(v);
    }
  }

  std::vector<std::string> rejected;
  for (const auto& [model, vs] : per_model) {
    bool retained = bdc::detect::gate(vs);
    std::cout << "model " << model << ": " << (retained ? "retained" : "rejected") << "\n";
    if (!retained) rejected.push_back(model);
  }
  std::cout << "rejected " << rejected.size() << " of " << per_model.size() << " models\n";

  std::ostringstream vout;
  bdc::records::write_verdicts(vout, verdict_records);
  ctx.write_output("verdicts.jsonl", vout.str());

  ctx.result = {{"models", per_model.size()}, {"rejected", rejected}};
  return ctx.finalize(rejected.empty() ? 0 : 1);
}

// ---- mitigate ---------------------------------------------------------

struct MitigateArgs {
  std::string config, out;
  std::string benchmark, benchmark_id;
  std::string strategy = "vanilla";
  std::uint64_t seed = 1;
  std::string endpoint, api_key_env, model;
  bdc::mitigate::ApplyOptions opts;
};

int run_mitigate(const MitigateArgs& a) {
  RunContext ctx("mitigate", a.out);
  std::string bytes = slurp(a.benchmark);
  ctx.add_input(a.benchmark, bytes);
  std::string bench_id = id_or_stem(a.benchmark_id, a.benchmark);
  ctx.params = {{"benchmark", a.benchmark},
                {"benchmark_id", bench_id},
                {"strategy", a.strategy},
                {"seed", a.seed},
                {"endpoint", a.endpoint},
                {"api_key_env", a.api_key_env},
                {"model", a.model},
                {"options",
                 {{"snippet", a.opts.snippet},
                  {"typo_rate", a.opts.typo_rate},
                  {"distractor_count", a.opts.distractor_count},
                  {"temperature", a.opts.temperature},
                  {"max_tokens", a.opts.max_tokens}}}};
  if (int rc = 0; ctx.up_to_date(rc)) return rc;

  std::istringstream is(bytes);
  bdc::Benchmark bench = bdc::records::read_benchmark(is, bench_id);
  const bdc::StrategySpec& spec = bdc::strategy(a.strategy);

  std::unique_ptr<bdc::OpenAIClient> backend;
  if (!a.endpoint.empty())
    backend = std::make_unique<bdc::OpenAIClient>(
        endpoint_client(a.endpoint, a.model, a.api_key_env));

  auto outcome = bdc::mitigate::update_benchmark(bench, spec, backend.get(), a.seed, a.opts);

  std::ostringstream bout;
  bdc::records::write_benchmark(bout, outcome.updated);
  ctx.write_output("benchmark.jsonl", bout.str());
  ctx.write_output("update.json", outcome.manifest.dump(2) + "\n");

  std::cout << "updated " << outcome.updated.items.size() << "/" << bench.items.size()
            << " items (skipped " << outcome.skipped.size() << ", failed "
            << outcome.failures.size() << ")\n";
  for (const auto& f : outcome.failures)
    std::cout << "failed " << f.question_id << ": " << f.reason << "\n";

  ctx.result = {{"updated", outcome.updated.items.size()},
                {"skipped", outcome.skipped.size()},
                {"failed", outcome.failures.size()}};
  return ctx.finalize(outcome.failures.empty() ? 0 : 1);
}

// ---- evaluate ---------------------------------------------------------

struct EvaluateArgs {
  std::string config, out;
  std::string benchmark, benchmark_id;
  std::string endpoint, api_key_env, model, model_id;
  std::string scenario = "clean";
  std::string ctype;  // empty = not recorded
  std::string few_shot_file;
  std::string open_ended = "numeric";
  std::string judge_endpoint, judge_model, judge_api_key_env;
  bool length_normalize = false;
  int concurrency = 1;
  int answer_max_tokens = 256;
  int judge_max_tokens = 4;
};

int run_evaluate(const EvaluateArgs& a) {
  RunContext ctx("evaluate", a.out);
  std::string bytes = slurp(a.benchmark);
  ctx.add_input(a.benchmark, bytes);
  std::string prefix;
  if (!a.few_shot_file.empty()) {
    prefix = slurp(a.few_shot_file);
    ctx.add_input(a.few_shot_file, prefix);
  }
  std::string bench_id = id_or_stem(a.benchmark_id, a.benchmark);
  std::string model_label = a.model_id.empty() ? a.model : a.model_id;
  ctx.params = {{"benchmark", a.benchmark},
                {"benchmark_id", bench_id},
                {"endpoint", a.endpoint},
                {"api_key_env", a.api_key_env},
                {"model", a.model},
                {"model_id", model_label},
                {"scenario", a.scenario},
                {"contamination_type", a.ctype.empty() ? json(nullptr) : json(a.ctype)},
                {"few_shot_file", a.few_shot_file},
                {"open_ended", a.open_ended},
                {"judge_endpoint", a.judge_endpoint},
                {"judge_model", a.judge_model},
                {"judge_api_key_env", a.judge_api_key_env},
                {"length_normalize", a.length_normalize},
                {"concurrency", a.concurrency},
                {"answer_max_tokens", a.answer_max_tokens},
                {"judge_max_tokens", a.judge_max_tokens}};
  if (int rc = 0; ctx.up_to_date(rc)) return rc;

  bdc::Scenario scenario = bdc::scenario_from_string(a.scenario);
  std::optional<bdc::ContaminationType> ct;
  if (!a.ctype.empty()) ct = bdc::contamination_type_from_string(a.ctype);

  bdc::harness::EvalOptions opts;
  opts.few_shot_prefix = prefix;
  opts.length_normalize = a.length_normalize;
  if (a.open_ended == "numeric")
    opts.open_ended = bdc::harness::OpenEndedScoring::NumericMarker;
  else if (a.open_ended == "judge")
    opts.open_ended = bdc::harness::OpenEndedScoring::Judge;
  else
    throw bdc::ConfigError("--open-ended must be numeric or judge");
  opts.answer_max_tokens = a.answer_max_tokens;
  opts.judge_max_tokens = a.judge_max_tokens;
  opts.concurrency = a.concurrency;

  std::istringstream is(bytes);
  bdc::Benchmark bench = bdc::records::read_benchmark(is, bench_id);

  bdc::OpenAIClient backend(endpoint_client(a.endpoint, a.model, a.api_key_env));
  std::unique_ptr<bdc::OpenAIClient> judge;
  if (!a.judge_endpoint.empty())
    judge = std::make_unique<bdc::OpenAIClient>(
        endpoint_client(a.judge_endpoint, a.judge_model.empty() ? a.model : a.judge_model,
                        a.judge_api_key_env));

  auto outcome =
      bdc::harness::evaluate(backend, judge.get(), bench, model_label, scenario, ct, opts);

  std::ostringstream vout;
  bdc::records::write_vector(vout, outcome.vector);
  ctx.write_output("results.jsonl", vout.str());

  std::vector<bdc::records::AuditRecord> audits;
  audits.reserve(outcome.audits.size());
  for (const auto& au : outcome.audits)
    audits.push_back({au.question_id, au.prompt_hash, au.raw_response, au.score});
  std::ostringstream aout;
  bdc::records::write_audits(aout, audits);
  ctx.write_output("audit.jsonl", aout.str());

  std::cout << "scored " << outcome.vector.size() << "/" << bench.items.size()
            << " items (failed " << outcome.failures.size() << ")";
  if (outcome.vector.mode() == bdc::ScoreMode::Binary) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", bdc::accuracy(outcome.vector));
    std::cout << " accuracy " << buf;
  }
  std::cout << "\n";
  for (const auto& f : outcome.failures)
    std::cout << "failed " << f.question_id << ": " << f.reason << "\n";

  ctx.result = {{"scored", outcome.vector.size()}, {"failed", outcome.failures.size()}};
  return ctx.finalize(outcome.failures.empty() ? 0 : 1);
}

// ---- simulate ---------------------------------------------------------

struct ArmSpec {
  std::string id;
  double flip_down = 0.3;
  double leak_through = 0.5;
};

struct SimulateArgs {
  std::string config, out;
  std::uint64_t seed = 1;
  std::size_t items = 500;
  std::size_t models = 10;
  std::size_t benchmarks = 3;
  double solve_prob = 0.6;
  double flip_down = 0.3;
  double leak_through = 0.5;
  double memorize_mild = 0.4;
  double memorize_intensive = 0.9;
  std::string strategy = "S1";
  std::vector<ArmSpec> arms;  // set after config merge
};

int run_simulate(const SimulateArgs& a) {
  RunContext ctx("simulate", a.out);
  json arms_json = json::array();
  for (const auto& s : a.arms)
    arms_json.push_back(
        {{"id", s.id}, {"flip_down", s.flip_down}, {"leak_through", s.leak_through}});
  ctx.params = {{"items", a.items},
                {"models", a.models},
                {"benchmarks", a.benchmarks},
                {"seed", a.seed},
                {"solve_prob", a.solve_prob},
                {"memorize_mild", a.memorize_mild},
                {"memorize_intensive", a.memorize_intensive},
                {"strategies", arms_json}};
  if (int rc = 0; ctx.up_to_date(rc)) return rc;

  if (a.models == 0) throw bdc::ConfigError("need at least one model");
  if (a.benchmarks == 0) throw bdc::ConfigError("need at least one benchmark");
  std::set<std::string> seen;
  for (const auto& s : a.arms) {
    if (s.id.empty() || s.id == "vanilla")
      throw bdc::ConfigError("strategy arm ids must be non-empty and distinct from vanilla");
    if (s.id.find('+') != std::string::npos)
      throw bdc::ConfigError("strategy id must not contain '+': " + s.id);
    if (!seen.insert(s.id).second) throw bdc::ConfigError("duplicate strategy arm: " + s.id);
  }

  auto base_cfg = bdc::sim::SimConfig::uniform(a.items, a.solve_prob);
  base_cfg.memorize_mild = a.memorize_mild;
  base_cfg.memorize_intensive = a.memorize_intensive;

  const auto ctypes = {bdc::ContaminationType::Mild, bdc::ContaminationType::Intensive};

  // Per (benchmark, model) all arms share one seed: the solve/flip/memorize
  // streams then coincide across arms, so every arm updates the same clean
  // model and the same memorized items, and only the arm rates differ.
  std::ostringstream vout;
  std::size_t vector_count = 0;
  for (std::size_t b = 0; b < a.benchmarks; ++b) {
    std::string bench_id = "sim-bench-" + std::to_string(b + 1);
    for (std::size_t m = 0; m < a.models; ++m) {
      char mb[32];
      std::snprintf(mb, sizeof(mb), "sim-model-%02zu", m + 1);
      std::string model_id = mb;
      std::uint64_t seed_bm = bdc::derive_seed(a.seed, {b, m});

      // vanilla: nothing flips, memorization leaks through untouched, and
      // the contaminated run happens on the original benchmark id
      bdc::sim::SimConfig vcfg = base_cfg;
      vcfg.flip_down = 0.0;
      vcfg.leak_through = 1.0;
      vcfg.seed = seed_bm;
      bool wrote_clean_original = false;
      for (auto ct : ctypes) {
        auto st = bdc::sim::simulate_triple(vcfg, ct, model_id, bench_id, bench_id, "vanilla");
        if (!wrote_clean_original) {
          bdc::records::write_vector(vout, st.triple.clean_on_original());
          ++vector_count;
          wrote_clean_original = true;
        }
        bdc::records::write_vector(vout, st.triple.contaminated_on_updated());
        ++vector_count;
      }

      for (const auto& arm : a.arms) {
        bdc::sim::SimConfig scfg = base_cfg;
        scfg.flip_down = arm.flip_down;
        scfg.leak_through = arm.leak_through;
        scfg.seed = seed_bm;
        std::string upd_id = bench_id + "+" + arm.id;
        bool wrote_clean_updated = false;
        for (auto ct : ctypes) {
          auto st = bdc::sim::simulate_triple(scfg, ct, model_id, bench_id, upd_id, arm.id);
          if (!wrote_clean_updated) {
            bdc::records::write_vector(vout, st.triple.clean_on_updated());
            ++vector_count;
            wrote_clean_updated = true;
          }
          bdc::records::write_vector(vout, st.triple.contaminated_on_updated());
          ++vector_count;
        }
      }
    }
  }
  ctx.write_output("vectors.jsonl", vout.str());

  auto expect_for = [&](const bdc::sim::SimConfig& cfg) {
    json per = json::object();
    for (auto ct : ctypes) {
      auto em = bdc::sim::expected_metrics(cfg, ct);
      per[bdc::to_string(ct)] = {{"fidelity", em.fidelity}, {"resistance", em.resistance}};
    }
    return per;
  };
  json expected{{"items", a.items},
                {"models", a.models},
                {"benchmarks", a.benchmarks},
                {"arms", json::object()}};
  {
    bdc::sim::SimConfig vcfg = base_cfg;
    vcfg.flip_down = 0.0;
    vcfg.leak_through = 1.0;
    expected["arms"]["vanilla"] = expect_for(vcfg);
  }
  for (const auto& arm : a.arms) {
    bdc::sim::SimConfig scfg = base_cfg;
    scfg.flip_down = arm.flip_down;
    scfg.leak_through = arm.leak_through;
    expected["arms"][arm.id] = expect_for(scfg);
  }
  ctx.write_output("expected.json", expected.dump(2) + "\n");

  std::cout << "simulated " << a.models << " models x " << a.benchmarks << " benchmarks x "
            << (a.arms.size() + 1) << " arms (" << a.items << " items, " << vector_count
            << " vectors)\n";
  ctx.result = {{"vectors", vector_count}};
  return ctx.finalize(0);
}

// ---- metrics ----------------------------------------------------------

struct MetricsArgs {
  std::string config, out;
  std::string vectors;
};

int run_metrics(const MetricsArgs& a) {
  RunContext ctx("metrics", a.out);
  std::string bytes = slurp(a.vectors);
  ctx.add_input(a.vectors, bytes);
  ctx.params = {{"vectors", a.vectors}};
  if (int rc = 0; ctx.up_to_date(rc)) return rc;

  std::istringstream is(bytes);
  auto vectors = bdc::records::read_vectors(is);

  std::map<std::pair<std::string, std::string>, const bdc::EvaluationVector*> clean;
  for (const auto& v : vectors) {
    if (v.scenario() != bdc::Scenario::Clean) continue;
    if (!clean.emplace(std::make_pair(v.model_id(), v.benchmark_id()), &v).second)
      throw bdc::FormatError("duplicate clean run for model " + v.model_id() + " on " +
                             v.benchmark_id());
  }

  std::vector<bdc::records::MetricRecord> rows;
  for (const auto& v : vectors) {
    if (v.scenario() == bdc::Scenario::Clean) continue;
    if (!v.contamination_type())
      throw bdc::FormatError("contaminated run missing contamination_type: model " +
                             v.model_id() + " on " + v.benchmark_id());
    // "<base>+<strategy>" names an updated benchmark; a bare id means the
    // contaminated model ran on the original benchmark, which is vanilla
    std::string upd = v.benchmark_id();
    std::string base = upd;
    std::string strat = "vanilla";
    if (auto pos = upd.rfind('+'); pos != std::string::npos) {
      base = upd.substr(0, pos);
      strat = upd.substr(pos + 1);
      if (base.empty() || strat.empty())
        throw bdc::FormatError("bad updated benchmark id: " + upd);
    }
    auto orig_it = clean.find({v.model_id(), base});
    if (orig_it == clean.end())
      throw bdc::FormatError("missing clean run on " + base + " for model " + v.model_id());
    auto upd_it = clean.find({v.model_id(), upd});
    if (upd_it == clean.end())
      throw bdc::FormatError("missing clean run on " + upd + " for model " + v.model_id());

    bdc::ScenarioTriple triple(*orig_it->second, *upd_it->second, v, strat);
    auto mr = bdc::compute_metrics(triple);
    bdc::records::MetricRecord rec;
    rec.model_id = v.model_id();
    rec.benchmark_id = base;
    rec.strategy_id = strat;
    rec.contamination_type = v.contamination_type();
    rec.mode = bdc::to_string(mr.mode);
    rec.n = mr.n;
    rec.fidelity = mr.fidelity;
    rec.resistance = mr.resistance;
    rows.push_back(std::move(rec));
  }
  if (rows.empty()) throw bdc::EmptyInput("no contaminated runs in " + a.vectors);

  std::sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) {
    auto key = [](const bdc::records::MetricRecord& r) {
      return std::make_tuple(r.benchmark_id, r.strategy_id,
                             std::string(bdc::to_string(*r.contamination_type)), r.model_id);
    };
    return key(x) < key(y);
  });

  std::ostringstream mout;
  bdc::records::write_metrics(mout, rows);
  ctx.write_output("metrics.jsonl", mout.str());

  std::cout << "wrote " << rows.size() << " metric rows\n";
  ctx.result = {{"rows", rows.size()}};
  return ctx.finalize(0);
}

// ---- report -----------------------------------------------------------

struct ReportArgs {
  std::string config, out;
  std::string metrics;
  double alpha = 0.05;
  std::string formats = "markdown,csv,svg";
};

int run_report(const ReportArgs& a) {
  RunContext ctx("report", a.out);
  std::string bytes = slurp(a.metrics);
  ctx.add_input(a.metrics, bytes);
  ctx.params = {{"metrics", a.metrics}, {"alpha", a.alpha}, {"formats", a.formats}};
  if (int rc = 0; ctx.up_to_date(rc)) return rc;

  std::istringstream is(bytes);
  auto rows = bdc::records::read_metrics(is);
  auto cells = bdc::report::build_cells(rows, a.alpha);

  std::vector<std::string> written;
  std::stringstream tokens(a.formats);
  std::string tok;
  while (std::getline(tokens, tok, ',')) {
    tok = trim_copy(tok);
    if (tok.empty()) continue;
    bdc::report::Format f = bdc::report::format_from_string(tok);
    const char* name = f == bdc::report::Format::Markdown ? "report.md"
                       : f == bdc::report::Format::Csv   ? "report.csv"
                                                         : "report.svg";
    if (std::find(written.begin(), written.end(), name) != written.end()) continue;
    ctx.write_output(name, bdc::report::render(cells, f));
    written.push_back(name);
  }
  if (written.empty()) throw bdc::ConfigError("--formats selected no output format");

  std::cout << "wrote";
  for (const auto& w : written) std::cout << " " << w;
  std::cout << " (" << cells.size() << " cells)\n";
  ctx.result = {{"cells", cells.size()}};
  return ctx.finalize(0);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"benchmark update toolkit: contamination detection, benchmark updates, "
               "evaluation, simulation, and reporting"};
  app.require_subcommand(1);

  DetectArgs da;
  MitigateArgs ma;
  EvaluateArgs ea;
  SimulateArgs sa;
  MetricsArgs xa;
  ReportArgs ra;

  CLI::App* detect = app.add_subcommand("detect", "screen models for benchmark contamination");
  detect->add_option("--config", da.config, "JSON config file; flags override its values");
  detect->add_option("--out", da.out, "output directory");
  detect->add_option("--scores", da.scores, "precomputed score records (JSONL)");
  detect->add_option("--benchmark", da.benchmark, "benchmark items (JSONL) for live probing");
  detect->add_option("--benchmark-id", da.benchmark_id, "benchmark id (default: file stem)");
  detect->add_option("--endpoint", da.endpoint, "completions endpoint URL");
  detect->add_option("--api-key-env", da.api_key_env, "environment variable holding the API key");
  detect->add_option("--model", da.model, "model name at the endpoint");
  detect->add_option("--model-id", da.model_id, "model label in outputs (default: --model)");
  detect->add_option("--k-percent", da.k_percent, "lowest-logprob share per example");
  detect->add_option("--min-k-threshold", da.min_k_threshold,
                     "token-probability score threshold (required for live probing)");
  detect->add_option("--shards", da.shards, "shard count for the rank test");
  detect->add_option("--permutations", da.permutations, "permutations per shard");
  detect->add_option("--rouge-threshold", da.rouge_threshold, "guessing similarity threshold");
  detect->add_option("--p-threshold", da.p_threshold, "rank test p-value threshold");
  detect->add_option("--seed", da.seed, "random seed");

  CLI::App* mitigate = app.add_subcommand("mitigate", "apply an update strategy to a benchmark");
  mitigate->add_option("--config", ma.config, "JSON config file; flags override its values");
  mitigate->add_option("--out", ma.out, "output directory");
  mitigate->add_option("--benchmark", ma.benchmark, "benchmark items (JSONL)");
  mitigate->add_option("--benchmark-id", ma.benchmark_id, "benchmark id (default: file stem)");
  mitigate->add_option("--strategy", ma.strategy, "strategy id (vanilla, S1..S20, S5-llm)");
  mitigate->add_option("--seed", ma.seed, "random seed");
  mitigate->add_option("--endpoint", ma.endpoint, "completions endpoint URL");
  mitigate->add_option("--api-key-env", ma.api_key_env,
                       "environment variable holding the API key");
  mitigate->add_option("--model", ma.model, "generation model name at the endpoint");
  mitigate->add_option("--snippet", ma.opts.snippet, "context snippet for S1");
  mitigate->add_option("--typo-rate", ma.opts.typo_rate, "per-word perturbation rate for S5");
  mitigate->add_option("--distractor-count", ma.opts.distractor_count,
                       "extra choices requested by S10");
  mitigate->add_option("--temperature", ma.opts.temperature, "generation temperature");
  mitigate->add_option("--max-tokens", ma.opts.max_tokens, "generation token budget");

  CLI::App* evaluate = app.add_subcommand("evaluate", "score a model on a benchmark");
  evaluate->add_option("--config", ea.config, "JSON config file; flags override its values");
  evaluate->add_option("--out", ea.out, "output directory");
  evaluate->add_option("--benchmark", ea.benchmark, "benchmark items (JSONL)");
  evaluate->add_option("--benchmark-id", ea.benchmark_id, "benchmark id (default: file stem)");
  evaluate->add_option("--endpoint", ea.endpoint, "completions endpoint URL");
  evaluate->add_option("--api-key-env", ea.api_key_env,
                       "environment variable holding the API key");
  evaluate->add_option("--model", ea.model, "model name at the endpoint");
  evaluate->add_option("--model-id", ea.model_id, "model label in outputs (default: --model)");
  evaluate->add_option("--scenario", ea.scenario, "clean | contaminated | mitigated");
  evaluate->add_option("--ctype", ea.ctype, "mild | intensive (label on the output vector)");
  evaluate->add_option("--few-shot", ea.few_shot_file, "file whose text prefixes every prompt");
  evaluate->add_option("--open-ended", ea.open_ended, "numeric | judge");
  evaluate->add_option("--judge-endpoint", ea.judge_endpoint, "judge endpoint URL");
  evaluate->add_option("--judge-model", ea.judge_model, "judge model name (default: --model)");
  evaluate->add_option("--judge-api-key-env", ea.judge_api_key_env,
                       "environment variable holding the judge API key");
  evaluate->add_flag("--length-normalize", ea.length_normalize,
                     "divide choice logprob sums by token count");
  evaluate->add_option("--concurrency", ea.concurrency, "parallel scoring workers");
  evaluate->add_option("--answer-max-tokens", ea.answer_max_tokens,
                       "token budget for open-ended answers");
  evaluate->add_option("--judge-max-tokens", ea.judge_max_tokens, "token budget for the judge");

  CLI::App* simulate = app.add_subcommand(
      "simulate", "generate synthetic evaluation vectors with known expectations");
  simulate->add_option("--config", sa.config, "JSON config file; flags override its values");
  simulate->add_option("--out", sa.out, "output directory");
  simulate->add_option("--seed", sa.seed, "random seed");
  simulate->add_option("--items", sa.items, "questions per benchmark");
  simulate->add_option("--models", sa.models, "simulated model count");
  simulate->add_option("--benchmarks", sa.benchmarks, "simulated benchmark count");
  simulate->add_option("--solve-prob", sa.solve_prob, "per-item clean solve probability");
  simulate->add_option("--flip-down", sa.flip_down, "update breaks a solved item");
  simulate->add_option("--leak-through", sa.leak_through, "memorization survives the update");
  simulate->add_option("--memorize-mild", sa.memorize_mild, "memorization rate, mild exposure");
  simulate->add_option("--memorize-intensive", sa.memorize_intensive,
                       "memorization rate, intensive exposure");
  simulate->add_option("--strategy", sa.strategy, "strategy label for the single-arm case");

  CLI::App* metrics = app.add_subcommand(
      "metrics", "compute fidelity and resistance from evaluation vectors");
  metrics->add_option("--config", xa.config, "JSON config file; flags override its values");
  metrics->add_option("--out", xa.out, "output directory");
  metrics->add_option("--vectors", xa.vectors, "evaluation vector records (JSONL)");

  CLI::App* report = app.add_subcommand("report", "render metric records into tables/figures");
  report->add_option("--config", ra.config, "JSON config file; flags override its values");
  report->add_option("--out", ra.out, "output directory");
  report->add_option("--metrics", ra.metrics, "metric records (JSONL)");
  report->add_option("--alpha", ra.alpha, "significance level for baseline comparisons");
  report->add_option("--formats", ra.formats, "comma list of markdown,csv,svg");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    ConfigFile cfg;
    if (app.got_subcommand(detect)) {
      if (!da.config.empty()) cfg.load(da.config);
      cfg.fill(*detect, "--out", "out", da.out);
      cfg.fill(*detect, "--scores", "scores", da.scores);
      cfg.fill(*detect, "--benchmark", "benchmark", da.benchmark);
      cfg.fill(*detect, "--benchmark-id", "benchmark_id", da.benchmark_id);
      cfg.fill(*detect, "--endpoint", "endpoint", da.endpoint);
      cfg.fill(*detect, "--api-key-env", "api_key_env", da.api_key_env);
      cfg.fill(*detect, "--model", "model", da.model);
      cfg.fill(*detect, "--model-id", "model_id", da.model_id);
      cfg.fill(*detect, "--k-percent", "k_percent", da.k_percent);
      cfg.fill(*detect, "--min-k-threshold", "min_k_threshold", da.min_k_threshold);
      cfg.fill(*detect, "--shards", "shards", da.shards);
      cfg.fill(*detect, "--permutations", "permutations", da.permutations);
      cfg.fill(*detect, "--rouge-threshold", "rouge_threshold", da.rouge_threshold);
      cfg.fill(*detect, "--p-threshold", "p_threshold", da.p_threshold);
      cfg.fill(*detect, "--seed", "seed", da.seed);
      da.have_min_k_threshold =
          detect->count("--min-k-threshold") > 0 || cfg.doc.contains("min_k_threshold");
      return run_detect(da);
    }
    if (app.got_subcommand(mitigate)) {
      if (!ma.config.empty()) cfg.load(ma.config);
      cfg.fill(*mitigate, "--out", "out", ma.out);
      cfg.fill(*mitigate, "--benchmark", "benchmark", ma.benchmark);
      cfg.fill(*mitigate, "--benchmark-id", "benchmark_id", ma.benchmark_id);
      cfg.fill(*mitigate, "--strategy", "strategy", ma.strategy);
      cfg.fill(*mitigate, "--seed", "seed", ma.seed);
      cfg.fill(*mitigate, "--endpoint", "endpoint", ma.endpoint);
      cfg.fill(*mitigate, "--api-key-env", "api_key_env", ma.api_key_env);
      cfg.fill(*mitigate, "--model", "model", ma.model);
      cfg.fill(*mitigate, "--snippet", "snippet", ma.opts.snippet);
      cfg.fill(*mitigate, "--typo-rate", "typo_rate", ma.opts.typo_rate);
      cfg.fill(*mitigate, "--distractor-count", "distractor_count", ma.opts.distractor_count);
      cfg.fill(*mitigate, "--temperature", "temperature", ma.opts.temperature);
      cfg.fill(*mitigate, "--max-tokens", "max_tokens", ma.opts.max_tokens);
      return run_mitigate(ma);
    }
    if (app.got_subcommand(evaluate)) {
      if (!ea.config.empty()) cfg.load(ea.config);
      cfg.fill(*evaluate, "--out", "out", ea.out);
      cfg.fill(*evaluate, "--benchmark", "benchmark", ea.benchmark);
      cfg.fill(*evaluate, "--benchmark-id", "benchmark_id", ea.benchmark_id);
      cfg.fill(*evaluate, "--endpoint", "endpoint", ea.endpoint);
      cfg.fill(*evaluate, "--api-key-env", "api_key_env", ea.api_key_env);
      cfg.fill(*evaluate, "--model", "model", ea.model);
      cfg.fill(*evaluate, "--model-id", "model_id", ea.model_id);
      cfg.fill(*evaluate, "--scenario", "scenario", ea.scenario);
      cfg.fill(*evaluate, "--ctype", "ctype", ea.ctype);
      cfg.fill(*evaluate, "--few-shot", "few_shot", ea.few_shot_file);
      cfg.fill(*evaluate, "--open-ended", "open_ended", ea.open_ended);
      cfg.fill(*evaluate, "--judge-endpoint", "judge_endpoint", ea.judge_endpoint);
      cfg.fill(*evaluate, "--judge-model", "judge_model", ea.judge_model);
      cfg.fill(*evaluate, "--judge-api-key-env", "judge_api_key_env", ea.judge_api_key_env);
      cfg.fill(*evaluate, "--length-normalize", "length_normalize", ea.length_normalize);
      cfg.fill(*evaluate, "--concurrency", "concurrency", ea.concurrency);
      cfg.fill(*evaluate, "--answer-max-tokens", "answer_max_tokens", ea.answer_max_tokens);
      cfg.fill(*evaluate, "--judge-max-tokens", "judge_max_tokens", ea.judge_max_tokens);
      return run_evaluate(ea);
    }
    if (app.got_subcommand(simulate)) {
      if (!sa.config.empty()) cfg.load(sa.config);
      cfg.fill(*simulate, "--out", "out", sa.out);
      cfg.fill(*simulate, "--seed", "seed", sa.seed);
      cfg.fill(*simulate, "--items", "items", sa.items);
      cfg.fill(*simulate, "--models", "models", sa.models);
      cfg.fill(*simulate, "--benchmarks", "benchmarks", sa.benchmarks);
      cfg.fill(*simulate, "--solve-prob", "solve_prob", sa.solve_prob);
      cfg.fill(*simulate, "--flip-down", "flip_down", sa.flip_down);
      cfg.fill(*simulate, "--leak-through", "leak_through", sa.leak_through);
      cfg.fill(*simulate, "--memorize-mild", "memorize_mild", sa.memorize_mild);
      cfg.fill(*simulate, "--memorize-intensive", "memorize_intensive", sa.memorize_intensive);
      cfg.fill(*simulate, "--strategy", "strategy", sa.strategy);
      if (cfg.doc.contains("strategies")) {
        const json& arr = cfg.doc.at("strategies");
        if (!arr.is_array() || arr.empty())
          throw bdc::ConfigError("config key strategies must be a non-empty array");
        try {
          for (const auto& e : arr) {
            if (!e.is_object())
              throw bdc::ConfigError("config strategies entries must be objects");
            sa.arms.push_back({e.value("id", std::string()),
                               e.value("flip_down", sa.flip_down),
                               e.value("leak_through", sa.leak_through)});
          }
        } catch (const json::exception&) {
          throw bdc::ConfigError("config strategies entries have wrong field types");
        }
      } else {
        sa.arms.push_back({sa.strategy, sa.flip_down, sa.leak_through});
      }
      return run_simulate(sa);
    }
    if (app.got_subcommand(metrics)) {
      if (!xa.config.empty()) cfg.load(xa.config);
      cfg.fill(*metrics, "--out", "out", xa.out);
      cfg.fill(*metrics, "--vectors", "vectors", xa.vectors);
      return run_metrics(xa);
    }
    if (app.got_subcommand(report)) {
      if (!ra.config.empty()) cfg.load(ra.config);
      cfg.fill(*report, "--out", "out", ra.out);
      cfg.fill(*report, "--metrics", "metrics", ra.metrics);
      cfg.fill(*report, "--alpha", "alpha", ra.alpha);
      cfg.fill(*report, "--formats", "formats", ra.formats);
      return run_report(ra);
    }
  } catch (const bdc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
