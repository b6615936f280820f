#pragma once
// Shorthand constructors for test data.

#include <optional>
#include <string>
#include <vector>

#include "bdc/eval_vector.hpp"
#include "bdc/rng.hpp"

namespace testutil {

inline std::vector<std::string> ids(std::size_t n, const std::string& prefix = "q") {
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

inline bdc::EvaluationVector vec(std::vector<double> entries,
                                 bdc::Scenario sc = bdc::Scenario::Clean,
                                 std::string model = "m1", std::string bench = "b1",
                                 std::optional<bdc::ContaminationType> ct = std::nullopt,
                                 std::string id_prefix = "q") {
  auto qids = ids(entries.size(), id_prefix);
  return bdc::EvaluationVector(std::move(model), std::move(bench), sc, ct, std::move(qids),
                               std::move(entries));
}

inline std::vector<double> random_binary_entries(bdc::Rng& rng, std::size_t n, double p = 0.5) {
  std::vector<double> e(n);
  for (auto& v : e) v = rng.bernoulli(p) ? 1.0 : 0.0;
  return e;
}

}  // namespace testutil
