#pragma once
// The built-in benchmark update strategies: what each one touches, how it
// is executed (seeded transform, generation call, or a composition of
// other strategies), and where it may be applied.

#include <map>
#include <string>
#include <vector>

#include "bdc/benchmark.hpp"
#include "bdc/errors.hpp"

namespace bdc {

enum class Scope { Question, Choices, QuestionAndChoices };

enum class StrategyKind { Deterministic, LLMBacked, Composite };

// How a generation reply (or seeded edit) is applied to the item.
enum class TransformKind {
  Identity,         // vanilla: no change
  PrependSnippet,   // fixed off-topic text glued before the question
  TypoPerturbation, // seeded spelling noise in the question
  PermuteChoices,   // seeded reorder, answer index follows its text
  QuestionRewrite,  // model returns a replacement question
  TranslateAll,     // model returns question (and choices) in another form
  ChoicesRewrite,   // model returns a replacement for every choice
  DistractorAppend, // model returns extra incorrect choices
  FullSample        // model returns a whole new item, answer included
};

struct StrategySpec {
  std::string id;
  std::string name;
  Scope scope = Scope::Question;
  StrategyKind kind = StrategyKind::Deterministic;
  TransformKind transform = TransformKind::Identity;
  std::vector<std::string> components;  // composite only, applied left to right
  // Answer is taken from the generation instead of carried over. Reports
  // flag these rows for manual review.
  bool semantic_altering = false;
};

inline const std::map<std::string, StrategySpec>& strategy_registry() {
  static const std::map<std::string, StrategySpec> reg = [] {
    std::map<std::string, StrategySpec> m;
    auto add = [&m](StrategySpec s) { m.emplace(s.id, std::move(s)); };
    add({"vanilla", "No Update", Scope::Question, StrategyKind::Deterministic,
         TransformKind::Identity, {}, false});
    add({"S1", "Irrelevant Context", Scope::Question, StrategyKind::Deterministic,
         TransformKind::PrependSnippet, {}, false});
    add({"S2", "Relevant Context", Scope::Question, StrategyKind::LLMBacked,
         TransformKind::QuestionRewrite, {}, false});
    add({"S3", "Syntactic Modification", Scope::Question, StrategyKind::LLMBacked,
         TransformKind::QuestionRewrite, {}, false});
    add({"S4", "Synonym Replacement", Scope::Question, StrategyKind::LLMBacked,
         TransformKind::QuestionRewrite, {}, false});
    add({"S5", "Typographical Perturbation", Scope::Question, StrategyKind::Deterministic,
         TransformKind::TypoPerturbation, {}, false});
    add({"S5-llm", "Typographical Perturbation (generated)", Scope::Question,
         StrategyKind::LLMBacked, TransformKind::QuestionRewrite, {}, false});
    add({"S6", "Translation (Chinese)", Scope::QuestionAndChoices, StrategyKind::LLMBacked,
         TransformKind::TranslateAll, {}, false});
    add({"S7", "Translation (French)", Scope::QuestionAndChoices, StrategyKind::LLMBacked,
         TransformKind::TranslateAll, {}, false});
    add({"S8", "Back-translation", Scope::QuestionAndChoices, StrategyKind::LLMBacked,
         TransformKind::TranslateAll, {}, false});
    add({"S9", "Choice Paraphrasing", Scope::Choices, StrategyKind::LLMBacked,
         TransformKind::ChoicesRewrite, {}, false});
    add({"S10", "Additional Incorrect Choices", Scope::Choices, StrategyKind::LLMBacked,
         TransformKind::DistractorAppend, {}, false});
    add({"S11", "Choices Permutation", Scope::Choices, StrategyKind::Deterministic,
         TransformKind::PermuteChoices, {}, false});
    add({"S12", "Clean-Eval", Scope::QuestionAndChoices, StrategyKind::Composite,
         TransformKind::Identity, {"S3", "S4", "S8"}, false});
    add({"S13", "ITD", Scope::QuestionAndChoices, StrategyKind::Composite,
         TransformKind::Identity, {"S2", "S3", "S4", "S9"}, false});
    add({"S14", "MPA", Scope::QuestionAndChoices, StrategyKind::Composite,
         TransformKind::Identity, {"S2", "S3", "S4", "S9", "S10", "S11"}, false});
    add({"S15", "MPA-Ques + Trans-CN", Scope::QuestionAndChoices, StrategyKind::Composite,
         TransformKind::Identity, {"S2", "S3", "S4", "S6"}, false});
    add({"S16", "MPA-Choice + Trans-CN", Scope::QuestionAndChoices, StrategyKind::Composite,
         TransformKind::Identity, {"S6", "S9", "S10"}, false});
    add({"S17", "Mimicking", Scope::QuestionAndChoices, StrategyKind::LLMBacked,
         TransformKind::FullSample, {}, true});
    add({"S18", "Remember-Understand Extension", Scope::QuestionAndChoices,
         StrategyKind::LLMBacked, TransformKind::FullSample, {}, true});
    add({"S19", "Application Extension", Scope::QuestionAndChoices, StrategyKind::LLMBacked,
         TransformKind::FullSample, {}, true});
    add({"S20", "Analysis Extension", Scope::QuestionAndChoices, StrategyKind::LLMBacked,
         TransformKind::FullSample, {}, true});
    return m;
  }();
  return reg;
}

inline const StrategySpec& strategy(const std::string& id) {
  const auto& reg = strategy_registry();
  auto it = reg.find(id);
  if (it == reg.end()) throw UnknownStrategy("unknown strategy: " + id);
  return it->second;
}

// The numbered strategies in order, without vanilla or variants.
inline std::vector<std::string> builtin_strategy_ids() {
  std::vector<std::string> out;
  for (int i = 1; i <= 20; ++i) out.push_back("S" + std::to_string(i));
  return out;
}

// True when the transform cannot run without answer choices.
inline bool transform_needs_choices(TransformKind t) {
  return t == TransformKind::PermuteChoices || t == TransformKind::ChoicesRewrite ||
         t == TransformKind::DistractorAppend;
}

// Multiple-choice items take every strategy. Open-ended items take any
// non-composite strategy that is not choices-only (question-and-choices
// strategies degrade to their question side), and a composite only when at
// least one component is pure question scope; choice-bound components are
// then skipped per item.
inline bool applicable_to(const StrategySpec& s, QuestionType t) {
  if (t == QuestionType::MultipleChoice) return true;
  if (s.kind == StrategyKind::Composite) {
    for (const auto& c : s.components)
      if (strategy(c).scope == Scope::Question) return true;
    return false;
  }
  return s.scope != Scope::Choices;
}

}  // namespace bdc
