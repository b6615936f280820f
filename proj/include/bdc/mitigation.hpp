#pragma once
// Benchmark update engine: seeded deterministic transforms, generation-
// backed transforms with a strict reply format and a single repair retry,
// and left-to-right composition. update_benchmark drives a whole benchmark
// through one strategy and reports per-item failures instead of aborting.

#include <cctype>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "bdc/backend.hpp"
#include "bdc/benchmark.hpp"
#include "bdc/errors.hpp"
#include "bdc/prompts.hpp"
#include "bdc/rng.hpp"
#include "bdc/strategy.hpp"

namespace bdc::mitigate {

struct ApplyOptions {
  std::string snippet = prompts::kIrrelevantSnippet;
  double typo_rate = 0.3;  // chance that an eligible word is perturbed
  int distractor_count = 2;
  double temperature = 0.7;
  int max_tokens = 512;
};

// ---- deterministic transforms ---------------------------------------------

inline BenchmarkItem prepend_irrelevant_context(const BenchmarkItem& item,
                                                const std::string& snippet) {
  BenchmarkItem out = item;
  if (!snippet.empty()) out.question = snippet + " " + item.question;
  out.applied_strategies.push_back("S1");
  return out;
}

namespace detail {

// One typo in one word: drop an interior letter or swap an adjacent
// interior pair. First and last letters stay put, so the edit distance to
// the original word is at most 2 and the word stays recognizable.
inline std::string perturb_word(const std::string& word, Rng& rng) {
  std::vector<std::size_t> alpha;
  for (std::size_t i = 0; i < word.size(); ++i)
    if (std::isalpha(static_cast<unsigned char>(word[i]))) alpha.push_back(i);
  if (alpha.size() < 4) return word;
  std::vector<std::size_t> interior(alpha.begin() + 1, alpha.end() - 1);
  std::string out = word;
  bool do_swap = rng.next_below(2) == 1;
  if (do_swap) {
    std::vector<std::size_t> pairs;  // positions p with p and p+1 both interior letters
    for (std::size_t k = 0; k + 1 < interior.size(); ++k)
      if (interior[k + 1] == interior[k] + 1) pairs.push_back(interior[k]);
    if (!pairs.empty()) {
      std::size_t p = pairs[rng.next_below(pairs.size())];
      std::swap(out[p], out[p + 1]);
      return out;
    }
    // no adjacent interior pair; fall through to a drop
  }
  std::size_t p = interior[rng.next_below(interior.size())];
  out.erase(p, 1);
  return out;
}

}  // namespace detail

inline BenchmarkItem perturb_typography(const BenchmarkItem& item, std::uint64_t seed,
                                        double rate) {
  Rng rng(seed);
  std::string result;
  result.reserve(item.question.size());
  std::size_t i = 0;
  const std::string& q = item.question;
  while (i < q.size()) {
    if (std::isspace(static_cast<unsigned char>(q[i]))) {
      result += q[i++];
      continue;
    }
    std::size_t start = i;
    while (i < q.size() && !std::isspace(static_cast<unsigned char>(q[i]))) ++i;
    std::string word = q.substr(start, i - start);
    if (rng.bernoulli(rate)) word = detail::perturb_word(word, rng);
    result += word;
  }
  BenchmarkItem out = item;
  out.question = std::move(result);
  out.applied_strategies.push_back("S5");
  return out;
}

inline BenchmarkItem permute_choices(const BenchmarkItem& item, std::uint64_t seed) {
  if (item.question_type != QuestionType::MultipleChoice)
    throw NotMultipleChoice("cannot permute choices of " + item.question_id);
  Rng rng(seed);
  auto perm = random_permutation(item.choices.size(), rng);
  BenchmarkItem out = item;
  std::string prov = "S11:perm=[";
  for (std::size_t i = 0; i < perm.size(); ++i) {
    out.choices[i] = item.choices[perm[i]];  // perm[i] = original index now at slot i
    if (perm[i] == static_cast<std::size_t>(item.answer_index))
      out.answer_index = static_cast<int>(i);
    if (i > 0) prov += ',';
    prov += std::to_string(perm[i]);
  }
  prov += ']';
  out.applied_strategies.push_back(std::move(prov));
  return out;
}

// ---- generation reply parsing ----------------------------------------------

struct ParsedFields {
  std::optional<std::string> question;
  std::vector<std::pair<char, std::string>> choices;  // letter, text
  std::vector<std::string> new_choices;
  std::optional<std::string> answer;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace detail

// Scans for the contract field labels; a labeled field runs until the next
// label, so multi-line values survive. Unlabeled leading chatter is
// dropped.
inline ParsedFields parse_generated_fields(const std::string& text) {
  ParsedFields out;
  enum class Slot { None, Question, Choice, NewChoice, Answer };
  Slot slot = Slot::None;
  char slot_letter = 0;
  std::string buffer;

  auto flush = [&] {
    std::string value = detail::trim(buffer);
    switch (slot) {
      case Slot::Question: out.question = value; break;
      case Slot::Choice: out.choices.emplace_back(slot_letter, value); break;
      case Slot::NewChoice: out.new_choices.push_back(value); break;
      case Slot::Answer: out.answer = value; break;
      case Slot::None: break;
    }
    buffer.clear();
  };

  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string line =
        nl == std::string::npos ? text.substr(pos) : text.substr(pos, nl - pos);
    std::string lead = line;
    std::size_t ws = 0;
    while (ws < lead.size() && std::isspace(static_cast<unsigned char>(lead[ws]))) ++ws;
    lead = lead.substr(ws);

    auto starts = [&lead](const char* label) { return lead.rfind(label, 0) == 0; };
    if (starts("UPDATED QUESTION:")) {
      flush();
      slot = Slot::Question;
      buffer = lead.substr(17);
    } else if (starts("UPDATED CHOICE ") && lead.size() > 16 && lead[16] == ':' &&
               std::isupper(static_cast<unsigned char>(lead[15]))) {
      flush();
      slot = Slot::Choice;
      slot_letter = lead[15];
      buffer = lead.substr(17);
    } else if (starts("UPDATED ANSWER:")) {
      flush();
      slot = Slot::Answer;
      buffer = lead.substr(15);
    } else if (starts("NEW CHOICE ")) {
      std::size_t d = 11;
      while (d < lead.size() && std::isdigit(static_cast<unsigned char>(lead[d]))) ++d;
      if (d > 11 && d < lead.size() && lead[d] == ':') {
        flush();
        slot = Slot::NewChoice;
        buffer = lead.substr(d + 1);
      } else if (slot != Slot::None) {
        buffer += '\n' + line;
      }
    } else if (slot != Slot::None) {
      buffer += '\n' + line;
    }
    if (nl == std::string::npos) break;
    pos = nl + 1;
  }
  flush();
  return out;
}

// ---- generation-backed application -----------------------------------------

namespace detail {

// Builds the updated item from parsed fields; returns an explanation of
// what is wrong instead when the reply does not satisfy the transform.
inline std::variant<BenchmarkItem, std::string> assemble(const BenchmarkItem& item,
                                                         const StrategySpec& spec,
                                                         const ParsedFields& f) {
  bool mc = item.question_type == QuestionType::MultipleChoice;
  BenchmarkItem out = item;
  auto choices_in_order = [&](std::size_t expected,
                              std::vector<std::string>& dst) -> std::optional<std::string> {
    if (f.choices.size() != expected)
      return "expected " + std::to_string(expected) + " updated choices, got " +
             std::to_string(f.choices.size());
    dst.assign(expected, "");
    for (const auto& [letter, text] : f.choices) {
      std::size_t idx = static_cast<std::size_t>(letter - 'A');
      if (idx >= expected) return std::string("unexpected choice letter ") + letter;
      if (!dst[idx].empty()) return std::string("duplicate choice letter ") + letter;
      if (text.empty()) return std::string("empty text for choice ") + letter;
      dst[idx] = text;
    }
    return std::nullopt;
  };

  switch (spec.transform) {
    case TransformKind::QuestionRewrite: {
      if (!f.question || f.question->empty()) return std::string("missing UPDATED QUESTION");
      out.question = *f.question;
      break;
    }
    case TransformKind::TranslateAll: {
      if (!f.question || f.question->empty()) return std::string("missing UPDATED QUESTION");
      out.question = *f.question;
      if (mc) {
        std::vector<std::string> ch;
        if (auto err = choices_in_order(item.choices.size(), ch)) return *err;
        out.choices = std::move(ch);
      }
      break;
    }
    case TransformKind::ChoicesRewrite: {
      std::vector<std::string> ch;
      if (auto err = choices_in_order(item.choices.size(), ch)) return *err;
      out.choices = std::move(ch);
      break;
    }
    case TransformKind::DistractorAppend: {
      if (f.new_choices.empty()) return std::string("missing NEW CHOICE lines");
      for (const auto& c : f.new_choices) {
        if (c.empty()) return std::string("empty NEW CHOICE text");
        out.choices.push_back(c);
      }
      if (out.choices.size() > 26) return std::string("too many choices after append");
      break;
    }
    case TransformKind::FullSample: {
      if (!f.question || f.question->empty()) return std::string("missing UPDATED QUESTION");
      if (!f.answer || f.answer->empty()) return std::string("missing UPDATED ANSWER");
      out.question = *f.question;
      if (mc) {
        std::vector<std::string> ch;
        if (auto err = choices_in_order(item.choices.size(), ch)) return *err;
        out.choices = std::move(ch);
        std::string ans = *f.answer;
        if (ans.size() != 1 || ans[0] < 'A' ||
            ans[0] >= static_cast<char>('A' + out.choices.size()))
          return "answer must be a single letter A-" +
                 std::string(1, choice_letter(out.choices.size() - 1));
        out.answer_index = ans[0] - 'A';
      } else {
        out.answer_text = *f.answer;
      }
      break;
    }
    default:
      return std::string("transform is not generation-backed");
  }
  out.applied_strategies.push_back(spec.id);
  return out;
}

}  // namespace detail

inline BenchmarkItem apply_llm_strategy(const BenchmarkItem& item, const StrategySpec& spec,
                                        InferenceBackend& backend,
                                        const ApplyOptions& opts = {}) {
  if (spec.kind != StrategyKind::LLMBacked)
    throw Error("apply_llm_strategy on non-generation strategy: " + spec.id);
  if (item.question_type == QuestionType::OpenEnded &&
      transform_needs_choices(spec.transform))
    throw ScopeViolation("strategy " + spec.id + " needs choices; item " + item.question_id +
                         " is open-ended");

  std::string prompt = prompts::build_mitigation_prompt(item, spec, opts.distractor_count);
  GenerationRequest req{prompt, opts.max_tokens, opts.temperature};

  auto attempt = [&](const GenerationRequest& r) -> std::variant<BenchmarkItem, std::string> {
    std::string reply;
    try {
      reply = backend.complete(r);
    } catch (const EndpointError& e) {
      throw GenerationFailure(std::string("generation failed for ") + item.question_id + ": " +
                              e.what());
    }
    return detail::assemble(item, spec, parse_generated_fields(reply));
  };

  auto first = attempt(req);
  if (std::holds_alternative<BenchmarkItem>(first)) return std::get<BenchmarkItem>(std::move(first));
  // one repair pass with the problem spelled out, then give up on the item
  GenerationRequest repair{prompt + prompts::repair_suffix(std::get<std::string>(first)),
                           opts.max_tokens, opts.temperature};
  auto second = attempt(repair);
  if (std::holds_alternative<BenchmarkItem>(second))
    return std::get<BenchmarkItem>(std::move(second));
  throw ParseFailure("unusable reply for " + item.question_id + " under " + spec.id + ": " +
                     std::get<std::string>(second));
}

// Applies one strategy of any kind. Composites run left to right on the
// running item; on open-ended items their choice-bound components are
// skipped. Seeds for deterministic components are derived per component so
// sibling components never share a stream.
inline BenchmarkItem apply_strategy(const BenchmarkItem& item, const StrategySpec& spec,
                                    InferenceBackend* backend, std::uint64_t seed,
                                    const ApplyOptions& opts = {}) {
  if (!applicable_to(spec, item.question_type))
    throw ScopeViolation("strategy " + spec.id + " does not apply to item " + item.question_id);
  switch (spec.kind) {
    case StrategyKind::Deterministic:
      switch (spec.transform) {
        case TransformKind::Identity: return item;
        case TransformKind::PrependSnippet: return prepend_irrelevant_context(item, opts.snippet);
        case TransformKind::TypoPerturbation: return perturb_typography(item, seed, opts.typo_rate);
        case TransformKind::PermuteChoices: return permute_choices(item, seed);
        default: throw Error("bad deterministic transform for " + spec.id);
      }
    case StrategyKind::LLMBacked:
      if (backend == nullptr)
        throw ConfigError("strategy " + spec.id + " needs a generation endpoint");
      return apply_llm_strategy(item, spec, *backend, opts);
    case StrategyKind::Composite: {
      BenchmarkItem cur = item;
      std::uint64_t comp_index = 0;
      for (const auto& comp_id : spec.components) {
        const auto& comp = strategy(comp_id);
        if (cur.question_type == QuestionType::OpenEnded &&
            (comp.scope == Scope::Choices || transform_needs_choices(comp.transform))) {
          ++comp_index;
          continue;
        }
        cur = apply_strategy(cur, comp, backend, derive_seed(seed, {comp_index}), opts);
        ++comp_index;
      }
      return cur;
    }
  }
  throw Error("unreachable strategy kind");
}

// ---- whole-benchmark updates ----------------------------------------

struct ItemFailure {
  std::string question_id;
  std::string reason;
};

struct UpdateOutcome {
  Benchmark updated;
  std::vector<std::string> skipped;  // question ids outside the strategy's scope
  std::vector<ItemFailure> failures;
  nlohmann::json manifest;
};

inline UpdateOutcome update_benchmark(const Benchmark& benchmark, const StrategySpec& spec,
                                      InferenceBackend* backend, std::uint64_t seed,
                                      const ApplyOptions& opts = {}) {
  benchmark.validate();
  UpdateOutcome out;
  out.updated.benchmark_id = benchmark.benchmark_id + "+" + spec.id;
  for (const auto& item : benchmark.items) {
    if (!applicable_to(spec, item.question_type)) {
      out.skipped.push_back(item.question_id);
      continue;
    }
    try {
      // seed by question id, so item order and earlier failures never
      // shift another item's stream
      BenchmarkItem upd =
          apply_strategy(item, spec, backend, derive_seed(seed, {fnv1a64(item.question_id)}), opts);
      upd.question_id = item.question_id;
      if (!upd.origin_id) upd.origin_id = item.question_id;
      upd.validate();
      out.updated.items.push_back(std::move(upd));
    } catch (const ScopeViolation&) {
      out.skipped.push_back(item.question_id);
    } catch (const GenerationFailure& e) {
      out.failures.push_back({item.question_id, e.what()});
    } catch (const ParseFailure& e) {
      out.failures.push_back({item.question_id, e.what()});
    } catch (const FormatError& e) {
      out.failures.push_back({item.question_id, e.what()});
    }
  }

  nlohmann::json failed = nlohmann::json::array();
  for (const auto& f : out.failures)
    failed.push_back({{"question_id", f.question_id}, {"reason", f.reason}});
  out.manifest = {{"strategy", spec.id},
                  {"components", spec.components},
                  {"seed", seed},
                  {"source_benchmark", benchmark.benchmark_id},
                  {"updated_benchmark", out.updated.benchmark_id},
                  {"source_items", benchmark.items.size()},
                  {"updated_items", out.updated.items.size()},
                  {"skipped", out.skipped},
                  {"failed", failed},
                  {"prompt_version", prompts::kVersion},
                  {"semantic_altering", spec.semantic_altering},
                  {"options",
                   {{"snippet", opts.snippet},
                    {"typo_rate", opts.typo_rate},
                    {"distractor_count", opts.distractor_count},
                    {"temperature", opts.temperature},
                    {"max_tokens", opts.max_tokens}}}};
  if (backend != nullptr) out.manifest["generation_model"] = backend->model_name();
  return out;
}

}  // namespace bdc::mitigate
