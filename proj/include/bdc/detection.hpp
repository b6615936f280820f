#pragma once
// Membership-inference style contamination detectors and the retain/reject
// gate over their verdicts. Three methods: lowest-k token probability
// scoring, a sharded original-vs-permuted likelihood rank test, and
// masked-option guessing scored with Rouge-L F1.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bdc/errors.hpp"
#include "bdc/stats.hpp"

namespace bdc::detect {

enum class Method { MinK, ShardedRank, TSGuessing };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::MinK: return "min_k";
    case Method::ShardedRank: return "sharded_rank";
    case Method::TSGuessing: return "ts_guessing";
  }
  return "min_k";
}

inline Method method_from_string(const std::string& s) {
  if (s == "min_k") return Method::MinK;
  if (s == "sharded_rank") return Method::ShardedRank;
  if (s == "ts_guessing") return Method::TSGuessing;
  throw FormatError("unknown detection method: " + s);
}

struct DetectionVerdict {
  Method method = Method::MinK;
  double score = 0.0;
  double threshold = 0.0;
  bool contaminated = false;
};

struct DetectionConfig {
  double k_percent = 20.0;
  int shard_count = 50;
  int permutations_per_shard = 25;
  double rouge_threshold = 0.4;
  double p_threshold = 0.05;
  // per-benchmark score thresholds for the token-probability method,
  // calibrated per model on held-out data
  std::map<std::string, double> min_k_thresholds;

  void validate() const {
    if (!(k_percent > 0.0 && k_percent <= 100.0)) throw BadK("k percent must be in (0, 100]");
    if (shard_count < 2) throw TooFewShards("need at least two shards");
    if (permutations_per_shard < 1) throw EmptyPermutations("need at least one permutation");
    if (!(p_threshold > 0.0 && p_threshold < 1.0)) throw ConfigError("p threshold in (0,1)");
    if (!std::isfinite(rouge_threshold)) throw ConfigError("rouge threshold must be finite");
  }
};

// Mean of the m lowest token log-probabilities, m = max(1, floor(k% of n)).
// Low values mean the model finds parts of the sample surprising.
inline double min_k_score(std::span<const double> token_logprobs, double k_percent) {
  if (token_logprobs.empty()) throw EmptyInput("no token logprobs");
  if (!(k_percent > 0.0 && k_percent <= 100.0)) throw BadK("k percent must be in (0, 100]");
  std::size_t n = token_logprobs.size();
  auto m = static_cast<std::size_t>(
      std::floor(k_percent * static_cast<double>(n) / 100.0));
  if (m < 1) m = 1;
  std::vector<double> sorted(token_logprobs.begin(), token_logprobs.end());
  std::sort(sorted.begin(), sorted.end());
  double s = 0.0;
  for (std::size_t i = 0; i < m; ++i) s += sorted[i];
  return s / static_cast<double>(m);
}

// Dataset-level score is the mean of per-example scores; contaminated when
// it meets or exceeds the calibrated threshold (boundary equality flags).
inline DetectionVerdict min_k_verdict(std::span<const double> example_scores, double threshold) {
  if (example_scores.empty()) throw EmptyInput("no example scores");
  double s = 0.0;
  for (double v : example_scores) s += v;
  s /= static_cast<double>(example_scores.size());
  return {Method::MinK, s, threshold, s >= threshold};
}

// Log-likelihood of one shard in benchmark order and under reshuffled
// orders of the same shard.
struct ShardLikelihoods {
  double ll_original = 0.0;
  std::vector<double> ll_permutations;
};

// One-sided test of whether the model prefers the published benchmark
// ordering: shard score = ll_original - mean(ll_permutations), tested
// against zero.
inline stats::TestResult sharded_rank_test(std::span<const ShardLikelihoods> shards,
                                           double p_threshold = 0.05) {
  if (shards.size() < 2) throw TooFewShards("need at least two shards");
  std::vector<double> scores;
  scores.reserve(shards.size());
  for (const auto& sh : shards) {
    if (sh.ll_permutations.empty()) throw EmptyPermutations("shard has no permutations");
    double m = 0.0;
    for (double v : sh.ll_permutations) m += v;
    m /= static_cast<double>(sh.ll_permutations.size());
    scores.push_back(sh.ll_original - m);
  }
  return stats::one_sample_t_one_sided(scores, 0.0, p_threshold);
}

// Contaminated strictly below the p threshold; p == threshold stays clean.
inline DetectionVerdict sharded_rank_verdict(std::span<const ShardLikelihoods> shards,
                                             double p_threshold = 0.05) {
  auto r = sharded_rank_test(shards, p_threshold);
  return {Method::ShardedRank, r.p_value, p_threshold, r.p_value < p_threshold};
}

inline DetectionVerdict sharded_rank_verdict_from_p(double p_value, double p_threshold = 0.05) {
  return {Method::ShardedRank, p_value, p_threshold, p_value < p_threshold};
}

// Lowercased whitespace tokens with surrounding ASCII punctuation stripped;
// tokens that were pure punctuation drop out.
inline std::vector<std::string> rouge_tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i == start) break;
    std::size_t b = start, e = i;
    while (b < e && std::ispunct(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && std::ispunct(static_cast<unsigned char>(text[e - 1]))) --e;
    if (b == e) continue;
    std::string tok;
    tok.reserve(e - b);
    for (std::size_t j = b; j < e; ++j)
      tok.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text[j]))));
    out.push_back(std::move(tok));
  }
  return out;
}

namespace detail {

inline std::size_t lcs_length(const std::vector<std::string>& a,
                              const std::vector<std::string>& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = (a[i - 1] == b[j - 1]) ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace detail

// Longest-common-subsequence F1 over normalized tokens. 0 when either side
// has no tokens or nothing is shared.
inline double rouge_l_f1(std::string_view prediction, std::string_view reference) {
  auto p = rouge_tokenize(prediction);
  auto r = rouge_tokenize(reference);
  if (p.empty() || r.empty()) return 0.0;
  double l = static_cast<double>(detail::lcs_length(p, r));
  if (l == 0.0) return 0.0;
  double prec = l / static_cast<double>(p.size());
  double rec = l / static_cast<double>(r.size());
  return 2.0 * prec * rec / (prec + rec);
}

struct GuessItem {
  std::string prediction;     // model's fill for the masked option
  std::string masked_option;  // the option that was hidden
};

// Contaminated strictly above the threshold: reliably reproducing hidden
// options implies exposure to the benchmark text.
inline DetectionVerdict ts_guessing_verdict(std::span<const GuessItem> items,
                                            double threshold = 0.4) {
  if (items.empty()) throw EmptyInput("no guessing items");
  double s = 0.0;
  for (const auto& it : items) s += rouge_l_f1(it.prediction, it.masked_option);
  s /= static_cast<double>(items.size());
  return {Method::TSGuessing, s, threshold, s > threshold};
}

inline DetectionVerdict ts_guessing_verdict_from_score(double mean_score,
                                                       double threshold = 0.4) {
  return {Method::TSGuessing, mean_score, threshold, mean_score > threshold};
}

inline DetectionVerdict min_k_verdict_from_score(double score, double threshold) {
  return {Method::MinK, score, threshold, score >= threshold};
}

// A pair is retained only when no method flags it. One flag is enough to
// reject; the methods are not majority-voted.
inline bool gate(std::span<const DetectionVerdict> verdicts) {
  if (verdicts.empty()) throw EmptyInput("gate needs at least one verdict");
  for (const auto& v : verdicts)
    if (v.contaminated) return false;
  return true;
}

}  // namespace bdc::detect
