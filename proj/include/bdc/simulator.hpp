#pragma once
// Synthetic contamination model. Per item: a clean model solves it with a
// known probability, a benchmark update breaks a solved item with
// probability flip_down, and a contaminated model additionally rescues an
// unsolved item when it was memorized and the update failed to disrupt
// the memorization. Closed-form expectations make the metric pipeline
// testable end to end, and a power study sizes real comparisons.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "bdc/errors.hpp"
#include "bdc/eval_vector.hpp"
#include "bdc/rng.hpp"
#include "bdc/stats.hpp"

namespace bdc::sim {

struct SimConfig {
  std::vector<double> solve_prob;   // per item: chance the clean model is right
  double flip_down = 0.3;           // update breaks a solved item
  double memorize_mild = 0.4;       // item memorized under mild exposure
  double memorize_intensive = 0.9;  // item memorized under intensive exposure
  double leak_through = 0.5;        // memorization survives the update
  std::uint64_t seed = 1;

  static SimConfig uniform(std::size_t items, double solve_probability) {
    SimConfig cfg;
    cfg.solve_prob.assign(items, solve_probability);
    return cfg;
  }

  double memorize(ContaminationType ctype) const {
    return ctype == ContaminationType::Intensive ? memorize_intensive : memorize_mild;
  }

  void validate() const {
    if (solve_prob.empty()) throw ConfigError("simulation needs at least one item");
    for (double p : solve_prob)
      if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("solve probability outside [0,1]");
    for (double p : {flip_down, memorize_mild, memorize_intensive, leak_through})
      if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("rate outside [0,1]");
  }
};

// The latent per-item outcomes behind a simulated run, for exact checks.
struct GroundTruth {
  std::vector<int> clean_original;
  std::vector<int> clean_updated;
  std::vector<int> contaminated_updated;
  std::size_t flipped_down = 0;  // solved items the update broke
  std::size_t rescued = 0;       // unsolved items memorization recovered
};

struct SimulatedTriple {
  ScenarioTriple triple;
  GroundTruth truth;
};

struct ExpectedMetrics {
  double fidelity = 0.0;
  double resistance = 0.0;
};

inline ExpectedMetrics expected_metrics(const SimConfig& cfg, ContaminationType ctype) {
  cfg.validate();
  double mean_p = 0.0, mean_unsolved = 0.0;
  for (double p : cfg.solve_prob) {
    mean_p += p;
    mean_unsolved += 1.0 - p * (1.0 - cfg.flip_down);
  }
  mean_p /= static_cast<double>(cfg.solve_prob.size());
  mean_unsolved /= static_cast<double>(cfg.solve_prob.size());
  return {1.0 - mean_p * cfg.flip_down,
          1.0 - mean_unsolved * cfg.memorize(ctype) * cfg.leak_through};
}

namespace detail {

inline std::string item_id(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "i%06zu", i);
  return buf;
}

}  // namespace detail

// The clean-model draws (solve and flip) use streams independent of the
// exposure type, so mild and intensive share their clean vectors exactly.
inline SimulatedTriple simulate_triple(const SimConfig& cfg, ContaminationType ctype,
                                       const std::string& model_id = "sim-model",
                                       const std::string& benchmark_id = "sim-bench",
                                       const std::string& updated_benchmark_id = "sim-bench+S",
                                       const std::string& strategy_id = "S") {
  cfg.validate();
  const std::size_t n = cfg.solve_prob.size();
  std::uint64_t ct_stream = ctype == ContaminationType::Intensive ? 1 : 0;

  GroundTruth truth;
  truth.clean_original.resize(n);
  truth.clean_updated.resize(n);
  truth.contaminated_updated.resize(n);
  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) {
    ids[i] = detail::item_id(i);
    Rng solve_rng(derive_seed(cfg.seed, {i, 0}));
    Rng flip_rng(derive_seed(cfg.seed, {i, 1}));
    Rng memo_rng(derive_seed(cfg.seed, {i, 2, ct_stream}));
    Rng leak_rng(derive_seed(cfg.seed, {i, 3, ct_stream}));

    bool solved = solve_rng.bernoulli(cfg.solve_prob[i]);
    bool flipped = flip_rng.bernoulli(cfg.flip_down);
    bool memorized = memo_rng.bernoulli(cfg.memorize(ctype));
    bool leaked = leak_rng.bernoulli(cfg.leak_through);

    truth.clean_original[i] = solved ? 1 : 0;
    truth.clean_updated[i] = (solved && !flipped) ? 1 : 0;
    bool rescued = !truth.clean_updated[i] && memorized && leaked;
    truth.contaminated_updated[i] = (truth.clean_updated[i] || rescued) ? 1 : 0;
    if (solved && flipped) ++truth.flipped_down;
    if (rescued) ++truth.rescued;
  }

  auto to_entries = [](const std::vector<int>& bits) {
    return std::vector<double>(bits.begin(), bits.end());
  };
  EvaluationVector clean_original(model_id, benchmark_id, Scenario::Clean, std::nullopt, ids,
                                  to_entries(truth.clean_original));
  EvaluationVector clean_updated(model_id, updated_benchmark_id, Scenario::Clean, std::nullopt,
                                 ids, to_entries(truth.clean_updated));
  EvaluationVector contaminated(model_id, updated_benchmark_id, Scenario::Contaminated, ctype,
                                ids, to_entries(truth.contaminated_updated));
  return {ScenarioTriple(std::move(clean_original), std::move(clean_updated),
                         std::move(contaminated), strategy_id),
          std::move(truth)};
}

// One simulated triple per (model, exposure type), clean parts shared
// across the two exposures of a model.
struct GridCell {
  std::string model_id;
  ContaminationType ctype = ContaminationType::Mild;
  SimulatedTriple run;
};

inline std::vector<GridCell> simulate_grid(const SimConfig& cfg, std::size_t model_count,
                                           const std::string& benchmark_id = "sim-bench",
                                           const std::string& updated_benchmark_id =
                                               "sim-bench+S") {
  cfg.validate();
  if (model_count == 0) throw ConfigError("need at least one model");
  std::vector<GridCell> cells;
  for (std::size_t m = 0; m < model_count; ++m) {
    SimConfig per_model = cfg;
    per_model.seed = derive_seed(cfg.seed, {m});
    std::string model_id = "sim-model-" + std::to_string(m + 1);
    for (auto ctype : {ContaminationType::Mild, ContaminationType::Intensive})
      cells.push_back(
          {model_id, ctype,
           simulate_triple(per_model, ctype, model_id, benchmark_id, updated_benchmark_id)});
  }
  return cells;
}

// ---- power study ------------------------------------------------------

// One benchmark-update profile to compare against the first (baseline)
// arm: how destructive the update is, and how much memorization survives.
struct PowerArm {
  std::string name;
  double flip_down = 0.3;
  double leak_through = 0.5;
};

struct PowerResult {
  std::string arm;
  double mean_fidelity = 0.0;
  double mean_resistance = 0.0;
  // fraction of trials where a one-sided paired test across models found
  // the baseline arm higher at the given alpha
  double fidelity_drop_rate = 0.0;
  double resistance_drop_rate = 0.0;
};

// Runs trials of the full metric path: simulate each model under both
// arms with paired seeds, compute fidelity and resistance, and test the
// baseline-minus-arm difference across models.
inline std::vector<PowerResult> power_study(const SimConfig& base, std::vector<PowerArm> arms,
                                            std::size_t model_count, std::size_t trials,
                                            ContaminationType ctype = ContaminationType::Mild,
                                            double alpha = 0.05) {
  base.validate();
  if (arms.empty()) throw ConfigError("power study needs at least one arm");
  if (model_count < 2) throw TooFewModels("power study needs at least two models");
  if (trials == 0) throw ConfigError("power study needs at least one trial");

  std::vector<PowerResult> results;
  for (std::size_t a = 0; a < arms.size(); ++a) {
    PowerResult res;
    res.arm = arms[a].name;
    std::size_t fid_hits = 0, resist_hits = 0;
    double fid_sum = 0.0, res_sum = 0.0;

    for (std::size_t t = 0; t < trials; ++t) {
      std::vector<std::string> labels;
      std::vector<double> base_fid, arm_fid, base_res, arm_res;
      for (std::size_t m = 0; m < model_count; ++m) {
        // one seed per (trial, model); arms reuse it so models are paired
        std::uint64_t seed = derive_seed(base.seed, {t, m});
        auto run_arm = [&](const PowerArm& arm) {
          SimConfig cfg = base;
          cfg.seed = seed;
          cfg.flip_down = arm.flip_down;
          cfg.leak_through = arm.leak_through;
          auto sim = simulate_triple(cfg, ctype);
          return compute_metrics(sim.triple);
        };
        auto baseline = run_arm(arms[0]);
        auto current = run_arm(arms[a]);
        labels.push_back("model-" + std::to_string(m));
        base_fid.push_back(*baseline.fidelity);
        arm_fid.push_back(*current.fidelity);
        base_res.push_back(*baseline.resistance);
        arm_res.push_back(*current.resistance);
        fid_sum += *current.fidelity;
        res_sum += *current.resistance;
      }
      auto fid_test = stats::paired_t_one_sided({labels, base_fid, arm_fid}, alpha);
      auto res_test = stats::paired_t_one_sided({labels, base_res, arm_res}, alpha);
      if (fid_test.significant) ++fid_hits;
      if (res_test.significant) ++resist_hits;
    }

    double runs = static_cast<double>(trials * model_count);
    res.mean_fidelity = fid_sum / runs;
    res.mean_resistance = res_sum / runs;
    res.fidelity_drop_rate = static_cast<double>(fid_hits) / static_cast<double>(trials);
    res.resistance_drop_rate = static_cast<double>(resist_hits) / static_cast<double>(trials);
    results.push_back(std::move(res));
  }
  return results;
}

}  // namespace bdc::sim
