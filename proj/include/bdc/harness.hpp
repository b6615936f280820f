#pragma once
// Runs a model over a benchmark and produces per-question scores, plus the
// logprob probes the contamination detectors consume. Items are scored
// independently: one bad item becomes a recorded failure, not a dead run.

#include <atomic>
#include <cctype>
#include <optional>
#include <regex>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "bdc/backend.hpp"
#include "bdc/benchmark.hpp"
#include "bdc/detection.hpp"
#include "bdc/errors.hpp"
#include "bdc/eval_vector.hpp"
#include "bdc/prompts.hpp"
#include "bdc/rng.hpp"

namespace bdc::harness {

// How open-ended answers are graded. Multiple choice always scores by
// comparing summed continuation logprobs across the choices.
enum class OpenEndedScoring { NumericMarker, Judge };

struct EvalOptions {
  std::string few_shot_prefix;  // prepended verbatim to every prompt
  bool length_normalize = false;  // divide choice logprob sums by token count
  OpenEndedScoring open_ended = OpenEndedScoring::NumericMarker;
  int answer_max_tokens = 256;
  int judge_max_tokens = 4;
  int concurrency = 1;
};

inline std::string render_prompt(const std::string& few_shot_prefix, const std::string& input) {
  return few_shot_prefix + "Question: " + input + "\n Answer:";
}

inline std::string mc_input(const BenchmarkItem& item) {
  return item.question + "\nChoices:\n" + prompts::choices_block(item.choices);
}

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Canonical integer form: commas out, sign kept only when negative,
// leading zeros dropped.
inline std::string normalize_integer(const std::string& raw) {
  std::string digits;
  bool negative = false;
  for (char c : raw) {
    if (c == ',') continue;
    if (c == '-' && digits.empty() && !negative) {
      negative = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw UnparseableNumber("not an integer: " + raw);
    digits += c;
  }
  if (digits.empty()) throw UnparseableNumber("not an integer: " + raw);
  std::size_t nz = digits.find_first_not_of('0');
  digits = (nz == std::string::npos) ? "0" : digits.substr(nz);
  return (negative && digits != "0") ? "-" + digits : digits;
}

}  // namespace detail

// Pulls the final answer out of a worked solution; the marker is required
// so mid-reasoning numbers are never mistaken for the answer.
inline std::string extract_numeric_answer(const std::string& completion) {
  static const std::regex marker(R"(####\s*(-?[\d,]+))");
  std::smatch m;
  std::string found;
  auto begin = completion.cbegin();
  while (std::regex_search(begin, completion.cend(), m, marker)) {
    found = m[1].str();  // keep the last marker if several appear
    begin = m.suffix().first;
  }
  if (found.empty()) throw NoMarker("no #### answer marker in completion");
  return detail::normalize_integer(found);
}

// Gold answers may be bare numbers or carry the same marker.
inline std::string gold_numeric_answer(const std::string& answer_text) {
  if (answer_text.find("####") != std::string::npos) return extract_numeric_answer(answer_text);
  return detail::normalize_integer(detail::trim(answer_text));
}

// Strict binary grading: the reply's first non-space character must be 1
// or 0. One retry, then the item is unjudgeable.
inline double judge_answer(InferenceBackend& judge, const std::string& question,
                           const std::string& reference, const std::string& candidate,
                           int max_tokens = 4) {
  GenerationRequest req{prompts::judge_prompt(question, reference, candidate), max_tokens, 0.0};
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::string reply = detail::trim(judge.complete(req));
    if (!reply.empty() && reply[0] == '1') return 1.0;
    if (!reply.empty() && reply[0] == '0') return 0.0;
  }
  throw JudgeUnparseable("judge reply was not 1 or 0");
}

// The logprob totals each choice earned, and which one the model picked.
struct ChoicePick {
  std::vector<double> totals;
  std::size_t picked = 0;
};

// Argmax of summed continuation logprobs over the choices; ties go to the
// lowest index so reruns cannot flip between equal choices.
inline ChoicePick pick_choice(InferenceBackend& backend, const BenchmarkItem& item,
                              const EvalOptions& opts) {
  if (item.question_type != QuestionType::MultipleChoice)
    throw NotMultipleChoice("choice scoring needs choices: " + item.question_id);
  std::string prompt = render_prompt(opts.few_shot_prefix, mc_input(item));
  ChoicePick result;
  for (std::size_t i = 0; i < item.choices.size(); ++i) {
    auto lp = backend.continuation_logprobs(prompt, " " + item.choices[i]);
    if (lp.empty()) throw MissingLogprobs("empty logprobs for choice");
    double total = 0.0;
    for (double v : lp) total += v;
    if (opts.length_normalize) total /= static_cast<double>(lp.size());
    result.totals.push_back(total);
    if (total > result.totals[result.picked]) result.picked = i;
  }
  return result;
}

struct ItemAudit {
  std::string question_id;
  std::string prompt_hash;  // fnv1a64 of the rendered prompt, hex
  std::string raw_response;  // json: enough to replay the grading offline
  double score = 0.0;
};

struct EvalFailure {
  std::string question_id;
  std::string reason;
};

struct EvalOutcome {
  EvaluationVector vector;
  std::vector<EvalFailure> failures;
  std::vector<ItemAudit> audits;
};

namespace detail {

inline std::string hash_hex(const std::string& s) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(s)));
  return buf;
}

struct ScoredItem {
  double score = 0.0;
  ItemAudit audit;
};

inline ScoredItem score_item(InferenceBackend& backend, InferenceBackend* judge,
                             const BenchmarkItem& item, const EvalOptions& opts) {
  ScoredItem out;
  out.audit.question_id = item.question_id;
  nlohmann::json raw;
  if (item.question_type == QuestionType::MultipleChoice) {
    std::string prompt = render_prompt(opts.few_shot_prefix, mc_input(item));
    auto pick = pick_choice(backend, item, opts);
    out.score = pick.picked == static_cast<std::size_t>(item.answer_index) ? 1.0 : 0.0;
    out.audit.prompt_hash = hash_hex(prompt);
    raw = {{"mode", "choice_logprob"}, {"choice_totals", pick.totals}, {"picked", pick.picked}};
  } else {
    std::string prompt = render_prompt(opts.few_shot_prefix, item.question);
    out.audit.prompt_hash = hash_hex(prompt);
    std::string completion =
        backend.complete({prompt, opts.answer_max_tokens, 0.0});
    if (opts.open_ended == OpenEndedScoring::NumericMarker) {
      std::string extracted = extract_numeric_answer(completion);
      std::string gold = gold_numeric_answer(item.answer_text);
      out.score = extracted == gold ? 1.0 : 0.0;
      raw = {{"mode", "numeric"},
             {"completion", completion},
             {"extracted", extracted},
             {"gold", gold}};
    } else {
      if (judge == nullptr) throw ConfigError("judge scoring requested without a judge model");
      out.score = judge_answer(*judge, item.question, item.answer_text, trim(completion),
                               opts.judge_max_tokens);
      raw = {{"mode", "judge"}, {"completion", completion}, {"verdict", out.score}};
    }
  }
  out.audit.raw_response = raw.dump();
  out.audit.score = out.score;
  return out;
}

}  // namespace detail

// Scores every item and assembles the per-question vector. Work is spread
// over a small pool; results land in slots indexed by benchmark order, so
// the output does not depend on thread scheduling. The backend must be
// safe for concurrent calls when concurrency > 1.
inline EvalOutcome evaluate(InferenceBackend& backend, InferenceBackend* judge,
                            const Benchmark& benchmark, const std::string& model_id,
                            Scenario scenario, std::optional<ContaminationType> ctype,
                            const EvalOptions& opts = {}) {
  benchmark.validate();
  if (opts.concurrency < 1) throw ConfigError("concurrency must be positive");
  if (opts.open_ended == OpenEndedScoring::Judge && judge == nullptr) {
    for (const auto& item : benchmark.items)
      if (item.question_type == QuestionType::OpenEnded)
        throw ConfigError("judge scoring requested without a judge model");
  }

  const std::size_t n = benchmark.items.size();
  std::vector<std::optional<detail::ScoredItem>> slots(n);
  std::vector<std::optional<std::string>> errors(n);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        slots[i] = detail::score_item(backend, judge, benchmark.items[i], opts);
      } catch (const Error& e) {
        errors[i] = e.what();
      }
    }
  };

  std::size_t pool = std::min<std::size_t>(opts.concurrency, n);
  if (pool <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < pool; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }

  std::vector<std::string> ids;
  std::vector<double> entries;
  std::vector<EvalFailure> failures;
  std::vector<ItemAudit> audits;
  for (std::size_t i = 0; i < n; ++i) {
    if (slots[i]) {
      ids.push_back(benchmark.items[i].question_id);
      entries.push_back(slots[i]->score);
      audits.push_back(slots[i]->audit);
    } else {
      failures.push_back({benchmark.items[i].question_id,
                          errors[i] ? *errors[i] : std::string("unknown failure")});
    }
  }
  if (entries.empty()) throw EmptyInput("every item failed to score");
  return {EvaluationVector(model_id, benchmark.benchmark_id, scenario, ctype, std::move(ids),
                           std::move(entries)),
          std::move(failures), std::move(audits)};
}

// ---- probes for the contamination detectors --------------------------------

// Text form a detector scores: the question, its choices, and the answer,
// exactly as a training-set copy of the benchmark would expose them.
inline std::string render_sample_text(const BenchmarkItem& item) {
  if (item.question_type == QuestionType::MultipleChoice)
    return item.question + "\n" + prompts::choices_block(item.choices) +
           "\nAnswer: " + item.answer_choice();
  return item.question + "\nAnswer: " + item.answer_text;
}

// Per-example mean of the lowest k percent of token logprobs.
inline std::vector<double> min_k_example_scores(InferenceBackend& backend,
                                                const Benchmark& benchmark, double k_percent) {
  benchmark.validate();
  std::vector<double> scores;
  scores.reserve(benchmark.items.size());
  for (const auto& item : benchmark.items)
    scores.push_back(
        detect::min_k_score(backend.sequence_logprobs(render_sample_text(item)), k_percent));
  return scores;
}

// Likelihood of each shard in published order versus seeded reorderings.
inline std::vector<detect::ShardLikelihoods> sharded_likelihoods(
    InferenceBackend& backend, const Benchmark& benchmark, std::size_t shard_count,
    std::size_t permutations_per_shard, std::uint64_t seed) {
  benchmark.validate();
  if (shard_count < 2) throw TooFewShards("need at least two shards");
  if (shard_count > benchmark.items.size())
    throw TooFewShards("more shards than benchmark items");
  if (permutations_per_shard == 0) throw EmptyPermutations("need at least one permutation");

  auto shard_ll = [&](const std::vector<const BenchmarkItem*>& items) {
    std::string text;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i > 0) text += "\n\n";
      text += render_sample_text(*items[i]);
    }
    double total = 0.0;
    for (double v : backend.sequence_logprobs(text)) total += v;
    return total;
  };

  const std::size_t n = benchmark.items.size();
  std::vector<detect::ShardLikelihoods> shards;
  for (std::size_t s = 0; s < shard_count; ++s) {
    std::size_t begin = s * n / shard_count;
    std::size_t end = (s + 1) * n / shard_count;
    std::vector<const BenchmarkItem*> members;
    for (std::size_t i = begin; i < end; ++i) members.push_back(&benchmark.items[i]);

    detect::ShardLikelihoods sh;
    sh.ll_original = shard_ll(members);
    for (std::size_t p = 0; p < permutations_per_shard; ++p) {
      Rng rng(derive_seed(seed, {s, p}));
      auto perm = random_permutation(members.size(), rng);
      std::vector<const BenchmarkItem*> reordered;
      for (std::size_t i : perm) reordered.push_back(members[i]);
      sh.ll_permutations.push_back(shard_ll(reordered));
    }
    shards.push_back(std::move(sh));
  }
  return shards;
}

// Asks the model to restore a hidden option of each multiple-choice item.
// The lowest-indexed incorrect option is masked, so the probe never leaks
// or asks for the answer itself.
inline std::vector<detect::GuessItem> ts_guess_items(InferenceBackend& backend,
                                                        const Benchmark& benchmark,
                                                        int max_tokens = 64) {
  benchmark.validate();
  std::vector<detect::GuessItem> items;
  for (const auto& item : benchmark.items) {
    if (item.question_type != QuestionType::MultipleChoice) continue;
    std::size_t masked = item.answer_index == 0 ? 1 : 0;
    std::string guess =
        backend.complete({prompts::ts_guessing_prompt(item, masked), max_tokens, 0.0});
    items.push_back({detail::trim(guess), item.choices[masked]});
  }
  if (items.empty()) throw EmptyInput("no multiple-choice items to probe");
  return items;
}

}  // namespace bdc::harness
