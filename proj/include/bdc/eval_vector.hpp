#pragma once
// Per-question evaluation vectors and the agreement metrics computed over
// them. A vector holds one score per question for one (model, benchmark,
// scenario) run; fidelity and resistance compare runs question-by-question,
// which is deliberately stricter than comparing aggregate accuracy.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "bdc/errors.hpp"

namespace bdc {

enum class Scenario { Clean, Contaminated, Mitigated };
enum class ContaminationType { Mild, Intensive };
enum class ScoreMode { Binary, Continuous };

inline const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::Clean: return "clean";
    case Scenario::Contaminated: return "contaminated";
    case Scenario::Mitigated: return "mitigated";
  }
  return "clean";
}

inline const char* to_string(ContaminationType t) {
  return t == ContaminationType::Mild ? "mild" : "intensive";
}

inline const char* to_string(ScoreMode m) {
  return m == ScoreMode::Binary ? "binary" : "continuous";
}

inline Scenario scenario_from_string(const std::string& s) {
  if (s == "clean") return Scenario::Clean;
  if (s == "contaminated") return Scenario::Contaminated;
  if (s == "mitigated") return Scenario::Mitigated;
  throw FormatError("unknown scenario: " + s);
}

inline ContaminationType contamination_type_from_string(const std::string& s) {
  if (s == "mild") return ContaminationType::Mild;
  if (s == "intensive") return ContaminationType::Intensive;
  throw FormatError("unknown contamination type: " + s);
}

// Immutable after construction. Entries are per-question scores in [0, 1];
// a vector is Binary when every entry is exactly 0 or 1, Continuous
// otherwise. Question ids are unique; entry i belongs to question_ids[i].
class EvaluationVector {
 public:
  EvaluationVector(std::string model_id, std::string benchmark_id, Scenario scenario,
                   std::optional<ContaminationType> contamination_type,
                   std::vector<std::string> question_ids, std::vector<double> entries)
      : model_id_(std::move(model_id)),
        benchmark_id_(std::move(benchmark_id)),
        scenario_(scenario),
        contamination_type_(contamination_type),
        question_ids_(std::move(question_ids)),
        entries_(std::move(entries)) {
    if (entries_.empty()) throw EmptyInput("evaluation vector must be non-empty");
    if (entries_.size() != question_ids_.size())
      throw LengthMismatch("entries and question_ids differ in length");
    std::unordered_set<std::string> seen;
    seen.reserve(question_ids_.size());
    for (const auto& id : question_ids_)
      if (!seen.insert(id).second) throw Error("duplicate question_id: " + id);
    mode_ = ScoreMode::Binary;
    for (double e : entries_) {
      if (!(e >= 0.0 && e <= 1.0)) throw Error("score outside [0,1]");
      if (e != 0.0 && e != 1.0) mode_ = ScoreMode::Continuous;
    }
  }

  const std::string& model_id() const { return model_id_; }
  const std::string& benchmark_id() const { return benchmark_id_; }
  Scenario scenario() const { return scenario_; }
  std::optional<ContaminationType> contamination_type() const { return contamination_type_; }
  const std::vector<std::string>& question_ids() const { return question_ids_; }
  const std::vector<double>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  ScoreMode mode() const { return mode_; }

 private:
  std::string model_id_;
  std::string benchmark_id_;
  Scenario scenario_;
  std::optional<ContaminationType> contamination_type_;
  std::vector<std::string> question_ids_;
  std::vector<double> entries_;
  ScoreMode mode_;
};

// y's entries reordered into x's question order. Alignment is by question
// id, never by position, so shuffled record files still pair correctly.
inline std::vector<double> entries_aligned_to(const EvaluationVector& x,
                                              const EvaluationVector& y) {
  if (x.size() != y.size())
    throw LengthMismatch("vectors differ in length: " + std::to_string(x.size()) + " vs " +
                         std::to_string(y.size()));
  if (x.question_ids() == y.question_ids()) return y.entries();
  std::unordered_map<std::string, std::size_t> index;
  index.reserve(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) index.emplace(y.question_ids()[i], i);
  std::vector<double> out;
  out.reserve(x.size());
  for (const auto& id : x.question_ids()) {
    auto it = index.find(id);
    if (it == index.end()) throw MisalignedQuestions("question id not in both vectors: " + id);
    out.push_back(y.entries()[it->second]);
  }
  return out;
}

// Fraction of questions answered differently, in [0, 1]. Both vectors must
// be binary; continuous runs go through pearson() instead.
inline double normalized_hamming(const EvaluationVector& x, const EvaluationVector& y) {
  if (x.mode() != ScoreMode::Binary || y.mode() != ScoreMode::Binary)
    throw NonBinaryInput("normalized Hamming distance requires binary vectors");
  std::vector<double> ye = entries_aligned_to(x, y);
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < ye.size(); ++i)
    if (x.entries()[i] != ye[i]) ++mismatches;
  return static_cast<double>(mismatches) / static_cast<double>(ye.size());
}

// Agreement for continuous score vectors. Undefined (nullopt) when either
// side has zero variance; range is [-1, 1], unlike the binary metrics.
inline std::optional<double> pearson(const EvaluationVector& x, const EvaluationVector& y) {
  std::vector<double> ye = entries_aligned_to(x, y);
  std::size_t n = ye.size();
  if (n < 2) throw TooFewPairs("pearson needs at least two entries");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x.entries()[i];
    my += ye[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = x.entries()[i] - mx;
    double dy = ye[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

// The three runs every mitigation assessment needs: the clean model on the
// original benchmark, the clean model on the updated benchmark, and the
// contaminated model on the updated benchmark. Construction aligns the
// second and third vectors into the first one's question order, so metric
// code downstream can work positionally.
class ScenarioTriple {
 public:
  ScenarioTriple(EvaluationVector clean_on_original, EvaluationVector clean_on_updated,
                 EvaluationVector contaminated_on_updated, std::string strategy_id)
      : clean_on_original_(std::move(clean_on_original)),
        clean_on_updated_(realign(clean_on_original_, std::move(clean_on_updated))),
        contaminated_on_updated_(realign(clean_on_original_, std::move(contaminated_on_updated))),
        strategy_id_(std::move(strategy_id)) {
    if (clean_on_original_.scenario() != Scenario::Clean ||
        clean_on_updated_.scenario() != Scenario::Clean)
      throw Error("clean runs must carry the clean scenario label");
    if (contaminated_on_updated_.scenario() == Scenario::Clean)
      throw Error("contaminated run carries a clean scenario label");
  }

  const EvaluationVector& clean_on_original() const { return clean_on_original_; }
  const EvaluationVector& clean_on_updated() const { return clean_on_updated_; }
  const EvaluationVector& contaminated_on_updated() const { return contaminated_on_updated_; }
  const std::string& strategy_id() const { return strategy_id_; }
  std::size_t size() const { return clean_on_original_.size(); }

 private:
  static EvaluationVector realign(const EvaluationVector& anchor, EvaluationVector v) {
    std::vector<double> aligned = entries_aligned_to(anchor, v);
    return EvaluationVector(v.model_id(), v.benchmark_id(), v.scenario(),
                            v.contamination_type(), anchor.question_ids(), std::move(aligned));
  }

  EvaluationVector clean_on_original_;
  EvaluationVector clean_on_updated_;
  EvaluationVector contaminated_on_updated_;
  std::string strategy_id_;
};

struct MetricResult {
  // Binary mode: always present, in [0, 1]. Continuous mode: Pearson-based,
  // in [-1, 1], absent when the correlation is undefined (zero variance).
  std::optional<double> fidelity;
  std::optional<double> resistance;
  ScoreMode mode = ScoreMode::Binary;
  std::size_t n = 0;
};

// How much the update changed what the clean model gets right.
inline double fidelity(const ScenarioTriple& t) {
  return 1.0 - normalized_hamming(t.clean_on_original(), t.clean_on_updated());
}

// How little contamination still shows through after the update.
inline double resistance(const ScenarioTriple& t) {
  return 1.0 - normalized_hamming(t.clean_on_updated(), t.contaminated_on_updated());
}

inline MetricResult compute_metrics(const ScenarioTriple& t) {
  ScoreMode a = t.clean_on_original().mode();
  ScoreMode b = t.clean_on_updated().mode();
  ScoreMode c = t.contaminated_on_updated().mode();
  if (a != b || b != c)
    throw MixedScoreModes("triple mixes binary and continuous vectors");
  MetricResult r;
  r.mode = a;
  r.n = t.size();
  if (a == ScoreMode::Binary) {
    r.fidelity = fidelity(t);
    r.resistance = resistance(t);
  } else {
    r.fidelity = pearson(t.clean_on_original(), t.clean_on_updated());
    r.resistance = pearson(t.clean_on_updated(), t.contaminated_on_updated());
  }
  return r;
}

inline double accuracy(const EvaluationVector& x) {
  if (x.mode() != ScoreMode::Binary) throw NonBinaryInput("accuracy requires a binary vector");
  double s = 0.0;
  for (double e : x.entries()) s += e;
  return s / static_cast<double>(x.size());
}

// Percentage-point accuracy gain of the contaminated run over the clean one.
inline double accuracy_inflation(const EvaluationVector& clean,
                                 const EvaluationVector& contaminated) {
  if (clean.mode() != ScoreMode::Binary || contaminated.mode() != ScoreMode::Binary)
    throw NonBinaryInput("accuracy inflation requires binary vectors");
  std::vector<double> ce = entries_aligned_to(clean, contaminated);
  double sc = 0.0, scc = 0.0;
  for (std::size_t i = 0; i < ce.size(); ++i) {
    sc += clean.entries()[i];
    scc += ce[i];
  }
  double n = static_cast<double>(ce.size());
  return 100.0 * (scc / n - sc / n);
}

// Of the questions the clean run got right, the fraction the other run
// still gets right.
inline double retained_correctness(const EvaluationVector& clean,
                                   const EvaluationVector& other) {
  if (clean.mode() != ScoreMode::Binary || other.mode() != ScoreMode::Binary)
    throw NonBinaryInput("retained correctness requires binary vectors");
  std::vector<double> oe = entries_aligned_to(clean, other);
  std::size_t base = 0, kept = 0;
  for (std::size_t i = 0; i < oe.size(); ++i) {
    if (clean.entries()[i] == 1.0) {
      ++base;
      if (oe[i] == 1.0) ++kept;
    }
  }
  if (base == 0) throw NoCorrectBaseline("clean run has no correct answers");
  return static_cast<double>(kept) / static_cast<double>(base);
}

// exp(-mean log-prob) over a token sequence. Logprobs must be <= 0.
inline double perplexity(std::span<const double> token_logprobs) {
  if (token_logprobs.empty()) throw EmptyInput("perplexity over an empty sequence");
  double s = 0.0;
  for (double lp : token_logprobs) {
    if (lp > 0.0) throw PositiveLogprob("log probabilities must be <= 0");
    s += lp;
  }
  return std::exp(-s / static_cast<double>(token_logprobs.size()));
}

}  // namespace bdc
