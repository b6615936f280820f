#pragma once
// JSON Lines record formats: one JSON object per line, field names frozen
// (see docs/formats.md). Keys serialize alphabetically, which makes reruns
// byte-comparable.

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "bdc/benchmark.hpp"
#include "bdc/detection.hpp"
#include "bdc/errors.hpp"
#include "bdc/eval_vector.hpp"

namespace bdc::records {

using nlohmann::json;

namespace detail {

inline json parse_line(const std::string& line, std::size_t lineno) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw FormatError("line " + std::to_string(lineno) + " is not a JSON object");
  return j;
}

template <typename T>
T field(const json& j, const char* name, std::size_t lineno) {
  auto it = j.find(name);
  if (it == j.end())
    throw FormatError("line " + std::to_string(lineno) + " missing field: " + name);
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw FormatError("line " + std::to_string(lineno) + " bad field: " + name);
  }
}

// 0/1 scores serialize as integers, everything else as decimals
inline json score_value(double s) {
  if (s == 0.0) return json(0);
  if (s == 1.0) return json(1);
  return json(s);
}

}  // namespace detail

// ---- evaluation vector records --------------------------------------

inline void write_vector(std::ostream& os, const EvaluationVector& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    json j{{"model_id", v.model_id()},
           {"benchmark_id", v.benchmark_id()},
           {"scenario", to_string(v.scenario())},
           {"question_id", v.question_ids()[i]},
           {"score", detail::score_value(v.entries()[i])}};
    if (v.contamination_type()) j["contamination_type"] = to_string(*v.contamination_type());
    os << j.dump() << '\n';
  }
}

inline void write_vectors(std::ostream& os, std::span<const EvaluationVector> vs) {
  for (const auto& v : vs) write_vector(os, v);
}

// Groups lines by (model, benchmark, scenario, contamination type); record
// order within a group is preserved, so alignment still happens by
// question id downstream, never by file position.
inline std::vector<EvaluationVector> read_vectors(std::istream& is) {
  struct Group {
    std::string model, bench, scenario, ctype;
    std::vector<std::string> qids;
    std::vector<double> entries;
  };
  std::vector<Group> groups;
  std::map<std::tuple<std::string, std::string, std::string, std::string>, std::size_t> index;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = detail::parse_line(line, lineno);
    Group g;
    g.model = detail::field<std::string>(j, "model_id", lineno);
    g.bench = detail::field<std::string>(j, "benchmark_id", lineno);
    g.scenario = detail::field<std::string>(j, "scenario", lineno);
    g.ctype = j.contains("contamination_type")
                  ? detail::field<std::string>(j, "contamination_type", lineno)
                  : "";
    auto key = std::make_tuple(g.model, g.bench, g.scenario, g.ctype);
    auto [it, inserted] = index.emplace(key, groups.size());
    if (inserted) groups.push_back(std::move(g));
    auto& grp = groups[it->second];
    grp.qids.push_back(detail::field<std::string>(j, "question_id", lineno));
    grp.entries.push_back(detail::field<double>(j, "score", lineno));
  }
  std::vector<EvaluationVector> out;
  out.reserve(groups.size());
  for (auto& g : groups) {
    std::optional<ContaminationType> ct;
    if (!g.ctype.empty()) ct = contamination_type_from_string(g.ctype);
    out.emplace_back(g.model, g.bench, scenario_from_string(g.scenario), ct, std::move(g.qids),
                     std::move(g.entries));
  }
  return out;
}

// ---- token logprob records -------------------------------------------

struct LogprobRecord {
  std::string question_id;
  int token_index = 0;
  double logprob = 0.0;
};

inline void write_logprobs(std::ostream& os, std::span<const LogprobRecord> rs) {
  for (const auto& r : rs) {
    json j{{"question_id", r.question_id}, {"token_index", r.token_index}, {"logprob", r.logprob}};
    os << j.dump() << '\n';
  }
}

inline std::vector<LogprobRecord> read_logprobs(std::istream& is) {
  std::vector<LogprobRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = detail::parse_line(line, lineno);
    out.push_back({detail::field<std::string>(j, "question_id", lineno),
                   detail::field<int>(j, "token_index", lineno),
                   detail::field<double>(j, "logprob", lineno)});
  }
  return out;
}

// ---- generation records ------------------------------------------------

struct GenerationRecord {
  std::string question_id;
  std::string text;
};

inline void write_generations(std::ostream& os, std::span<const GenerationRecord> rs) {
  for (const auto& r : rs) {
    json j{{"question_id", r.question_id}, {"text", r.text}};
    os << j.dump() << '\n';
  }
}

inline std::vector<GenerationRecord> read_generations(std::istream& is) {
  std::vector<GenerationRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = detail::parse_line(line, lineno);
    out.push_back({detail::field<std::string>(j, "question_id", lineno),
                   detail::field<std::string>(j, "text", lineno)});
  }
  return out;
}

// ---- detection verdict records -----------------------------------------

struct VerdictRecord {
  std::string method;
  std::string benchmark_id;
  std::string model_id;
  double score = 0.0;
  double threshold = 0.0;
  bool contaminated = false;
};

inline VerdictRecord make_verdict_record(const detect::DetectionVerdict& v,
                                         std::string model_id, std::string benchmark_id) {
  return {detect::to_string(v.method), std::move(benchmark_id), std::move(model_id), v.score,
          v.threshold, v.contaminated};
}

inline void write_verdicts(std::ostream& os, std::span<const VerdictRecord> rs) {
  for (const auto& r : rs) {
    json j{{"method", r.method},       {"benchmark_id", r.benchmark_id},
           {"model_id", r.model_id},   {"score", r.score},
           {"threshold", r.threshold}, {"contaminated", r.contaminated}};
    os << j.dump() << '\n';
  }
}

inline std::vector<VerdictRecord> read_verdicts(std::istream& is) {
  std::vector<VerdictRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = detail::parse_line(line, lineno);
    out.push_back({detail::field<std::string>(j, "method", lineno),
                   detail::field<std::string>(j, "benchmark_id", lineno),
                   detail::field<std::string>(j, "model_id", lineno),
                   detail::field<double>(j, "score", lineno),
                   detail::field<double>(j, "threshold", lineno),
                   detail::field<bool>(j, "contaminated", lineno)});
  }
  return out;
}

// ---- precomputed detection scores (fixture input to the detect command) --

struct ScoreRecord {
  std::string model_id;
  std::string benchmark_id;
  std::string method;
  double score = 0.0;
  double threshold = 0.0;
};

inline void write_scores(std::ostream& os, std::span<const ScoreRecord> rs) {
  for (const auto& r : rs) {
    json j{{"model_id", r.model_id},
           {"benchmark_id", r.benchmark_id},
           {"method", r.method},
           {"score", r.score},
           {"threshold", r.threshold}};
    os << j.dump() << '\n';
  }
}

inline std::vector<ScoreRecord> read_scores(std::istream& is) {
  std::vector<ScoreRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = detail::parse_line(line, lineno);
    out.push_back({detail::field<std::string>(j, "model_id", lineno),
                   detail::field<std::string>(j, "benchmark_id", lineno),
                   detail::field<std::string>(j, "method", lineno),
                   detail::field<double>(j, "score", lineno),
                   detail::field<double>(j, "threshold", lineno)});
  }
  return out;
}

// ---- per-item audit records ----------------------------------------------

struct AuditRecord {
  std::string question_id;
  std::string prompt_hash;
  std::string raw_response;  // JSON payload, shape depends on the eval mode
  double score = 0.0;
};

inline void write_audits(std::ostream& os, std::span<const AuditRecord> rs) {
  for (const auto& r : rs) {
    json j{{"question_id", r.question_id},
           {"prompt_hash", r.prompt_hash},
           {"raw_response", r.raw_response},
           {"score", detail::score_value(r.score)}};
    os << j.dump() << '\n';
  }
}

inline std::vector<AuditRecord> read_audits(std::istream& is) {
  std::vector<AuditRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = detail::parse_line(line, lineno);
    out.push_back({detail::field<std::string>(j, "question_id", lineno),
                   detail::field<std::string>(j, "prompt_hash", lineno),
                   detail::field<std::string>(j, "raw_response", lineno),
                   detail::field<double>(j, "score", lineno)});
  }
  return out;
}

// ---- metric result records -------------------------------------------

struct MetricRecord {
  std::string model_id;
  std::string benchmark_id;  // base benchmark, without the strategy suffix
  std::string strategy_id;
  std::optional<ContaminationType> contamination_type;
  std::string mode;  // "binary" | "continuous"
  std::size_t n = 0;
  std::optional<double> fidelity;    // absent = undefined
  std::optional<double> resistance;  // absent = undefined
};

inline void write_metrics(std::ostream& os, std::span<const MetricRecord> rs) {
  for (const auto& r : rs) {
    json j{{"model_id", r.model_id},
           {"benchmark_id", r.benchmark_id},
           {"strategy_id", r.strategy_id},
           {"mode", r.mode},
           {"n", r.n},
           {"fidelity", r.fidelity ? json(*r.fidelity) : json(nullptr)},
           {"resistance", r.resistance ? json(*r.resistance) : json(nullptr)}};
    if (r.contamination_type) j["contamination_type"] = to_string(*r.contamination_type);
    os << j.dump() << '\n';
  }
}

inline std::vector<MetricRecord> read_metrics(std::istream& is) {
  std::vector<MetricRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = detail::parse_line(line, lineno);
    MetricRecord r;
    r.model_id = detail::field<std::string>(j, "model_id", lineno);
    r.benchmark_id = detail::field<std::string>(j, "benchmark_id", lineno);
    r.strategy_id = detail::field<std::string>(j, "strategy_id", lineno);
    r.mode = detail::field<std::string>(j, "mode", lineno);
    r.n = detail::field<std::size_t>(j, "n", lineno);
    if (j.contains("contamination_type"))
      r.contamination_type = contamination_type_from_string(
          detail::field<std::string>(j, "contamination_type", lineno));
    if (j.contains("fidelity") && !j["fidelity"].is_null())
      r.fidelity = detail::field<double>(j, "fidelity", lineno);
    if (j.contains("resistance") && !j["resistance"].is_null())
      r.resistance = detail::field<double>(j, "resistance", lineno);
    out.push_back(std::move(r));
  }
  return out;
}

// ---- benchmark item records ----------------------------------------------

inline void write_benchmark(std::ostream& os, const Benchmark& b) {
  for (const auto& it : b.items) {
    json j{{"question_id", it.question_id},
           {"question", it.question},
           {"question_type", to_string(it.question_type)},
           {"applied_strategies", it.applied_strategies}};
    if (it.question_type == QuestionType::MultipleChoice) {
      j["choices"] = it.choices;
      j["answer"] = it.answer_index;
    } else {
      j["answer"] = it.answer_text;
    }
    if (it.origin_id) j["origin_id"] = *it.origin_id;
    os << j.dump() << '\n';
  }
}

inline Benchmark read_benchmark(std::istream& is, std::string benchmark_id) {
  Benchmark b;
  b.benchmark_id = std::move(benchmark_id);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = detail::parse_line(line, lineno);
    BenchmarkItem it;
    it.question_id = detail::field<std::string>(j, "question_id", lineno);
    it.question = detail::field<std::string>(j, "question", lineno);
    it.question_type =
        question_type_from_string(detail::field<std::string>(j, "question_type", lineno));
    if (j.contains("applied_strategies"))
      it.applied_strategies = detail::field<std::vector<std::string>>(j, "applied_strategies", lineno);
    if (it.question_type == QuestionType::MultipleChoice) {
      it.choices = detail::field<std::vector<std::string>>(j, "choices", lineno);
      it.answer_index = detail::field<int>(j, "answer", lineno);
    } else {
      it.answer_text = detail::field<std::string>(j, "answer", lineno);
    }
    if (j.contains("origin_id")) it.origin_id = detail::field<std::string>(j, "origin_id", lineno);
    b.items.push_back(std::move(it));
  }
  b.validate();
  return b;
}

}  // namespace bdc::records
