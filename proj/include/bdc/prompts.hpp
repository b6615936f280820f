#pragma once
// Instruction templates for generation-backed benchmark updates, the
// answer judge, and masked-option guessing. The original instruction texts
// behind the published update strategies are not available, so these are
// this toolkit's own phrasings; the version constant is recorded in run
// manifests so outputs can be traced to the wording that produced them.

#include <string>
#include <vector>

#include "bdc/benchmark.hpp"
#include "bdc/errors.hpp"
#include "bdc/strategy.hpp"

namespace bdc::prompts {

inline constexpr int kVersion = 1;

// Off-topic prefix used by the irrelevant-context strategy.
inline constexpr const char* kIrrelevantSnippet = "https://t.co/DlI9kw";

inline std::string choices_block(const std::vector<std::string>& choices) {
  std::string out;
  for (std::size_t i = 0; i < choices.size(); ++i) {
    out += choice_letter(i);
    out += ": ";
    out += choices[i];
    if (i + 1 < choices.size()) out += '\n';
  }
  return out;
}

// Task description per strategy. Composite and deterministic ids have none.
inline std::string instruction_head(const std::string& strategy_id) {
  if (strategy_id == "S2")
    return "Write a short scene-setting passage of two or three sentences that is topically "
           "related to the question below, then restate the question unchanged after it. The "
           "passage must not hint at the answer.";
  if (strategy_id == "S3")
    return "Rewrite the question below with a different syntactic structure, for example by "
           "reordering clauses or switching between active and passive voice. Keep its meaning, "
           "difficulty, and correct answer unchanged.";
  if (strategy_id == "S4")
    return "Rewrite the question below, replacing several words with synonyms. Keep its "
           "meaning, difficulty, and correct answer unchanged.";
  if (strategy_id == "S5-llm")
    return "Rewrite the question below, introducing a few small realistic typos such as "
           "dropped or swapped letters. Keep every word recognizable and the meaning intact.";
  if (strategy_id == "S6")
    return "Translate the question and any answer choices below into Chinese. Keep names, "
           "numbers, and technical notation accurate. The correct answer must stay the same "
           "option.";
  if (strategy_id == "S7")
    return "Translate the question and any answer choices below into French. Keep names, "
           "numbers, and technical notation accurate. The correct answer must stay the same "
           "option.";
  if (strategy_id == "S8")
    return "Translate the question and any answer choices below into Chinese, then translate "
           "that Chinese text back into English. Reply with the final English version only. "
           "The correct answer must stay the same option.";
  if (strategy_id == "S9")
    return "Reword and restructure every answer choice below without changing what any of "
           "them claims. Keep the number and order of the choices.";
  if (strategy_id == "S10")
    return "Write additional plausible but clearly incorrect answer choices for the question "
           "below. They must be on topic, wrong, and must not duplicate any existing choice.";
  if (strategy_id == "S17")
    return "Write a new question in the same style and format as the one below, but about a "
           "different concept from the same subject area. Provide the same number of answer "
           "choices and state which one is correct.";
  if (strategy_id == "S18")
    return "Using the question below as a starting point, write a new question that tests "
           "recall and basic understanding of the underlying facts. Provide answer choices in "
           "the same format and state which one is correct.";
  if (strategy_id == "S19")
    return "Using the question below as a starting point, write a new question that requires "
           "applying the underlying concept to a practical problem. Provide answer choices in "
           "the same format and state which one is correct.";
  if (strategy_id == "S20")
    return "Using the question below as a starting point, write a new question that requires "
           "analyzing how the concepts involved relate to each other. Provide answer choices "
           "in the same format and state which one is correct.";
  throw UnknownStrategy("no instruction template for strategy: " + strategy_id);
}

namespace detail {

inline std::string item_block(const BenchmarkItem& item) {
  std::string out = "Question: " + item.question;
  if (item.question_type == QuestionType::MultipleChoice)
    out += "\nChoices:\n" + choices_block(item.choices);
  return out;
}

inline std::string output_contract(TransformKind t, const BenchmarkItem& item,
                                   int distractor_count) {
  bool mc = item.question_type == QuestionType::MultipleChoice;
  std::string out = "Reply with exactly these lines and nothing else:\n";
  switch (t) {
    case TransformKind::QuestionRewrite:
      out += "UPDATED QUESTION: <the new question text>";
      break;
    case TransformKind::TranslateAll:
      out += "UPDATED QUESTION: <the new question text>";
      if (mc)
        for (std::size_t i = 0; i < item.choices.size(); ++i) {
          out += "\nUPDATED CHOICE ";
          out += choice_letter(i);
          out += ": <the new text of choice ";
          out += choice_letter(i);
          out += ">";
        }
      break;
    case TransformKind::ChoicesRewrite:
      for (std::size_t i = 0; i < item.choices.size(); ++i) {
        if (i > 0) out += '\n';
        out += "UPDATED CHOICE ";
        out += choice_letter(i);
        out += ": <the new text of choice ";
        out += choice_letter(i);
        out += ">";
      }
      break;
    case TransformKind::DistractorAppend:
      for (int i = 1; i <= distractor_count; ++i) {
        if (i > 1) out += '\n';
        out += "NEW CHOICE " + std::to_string(i) + ": <an incorrect choice>";
      }
      break;
    case TransformKind::FullSample:
      out += "UPDATED QUESTION: <the new question text>";
      if (mc) {
        for (std::size_t i = 0; i < item.choices.size(); ++i) {
          out += "\nUPDATED CHOICE ";
          out += choice_letter(i);
          out += ": <the text of choice ";
          out += choice_letter(i);
          out += ">";
        }
        out += "\nUPDATED ANSWER: <the letter of the correct choice>";
      } else {
        out += "\nUPDATED ANSWER: <the correct answer>";
      }
      break;
    default:
      throw Error("transform has no output contract");
  }
  return out;
}

}  // namespace detail

inline std::string build_mitigation_prompt(const BenchmarkItem& item, const StrategySpec& spec,
                                           int distractor_count = 2) {
  if (spec.kind != StrategyKind::LLMBacked)
    throw Error("prompt requested for a non-generation strategy: " + spec.id);
  return instruction_head(spec.id) + "\n\n" + detail::item_block(item) + "\n\n" +
         detail::output_contract(spec.transform, item, distractor_count);
}

// Appended to the original prompt after an unusable reply; one retry only.
inline std::string repair_suffix(const std::string& problem) {
  return "\n\nYour previous reply could not be used: " + problem +
         ". Reply again following the required format exactly.";
}

// Strict binary grading contract: the reply must start with 1 or 0.
inline std::string judge_prompt(const std::string& question, const std::string& reference,
                                const std::string& candidate) {
  return "You are grading an answer to a question. Reply with a single character: 1 if the "
         "candidate answer is correct given the reference answer, 0 if it is not. Write "
         "nothing else.\n\nQuestion: " +
         question + "\nReference answer: " + reference + "\nCandidate answer: " + candidate;
}

// Masked-option completion probe. The option at masked_index is hidden.
inline std::string ts_guessing_prompt(const BenchmarkItem& item, std::size_t masked_index) {
  if (item.question_type != QuestionType::MultipleChoice)
    throw NotMultipleChoice("guessing probe needs choices: " + item.question_id);
  if (masked_index >= item.choices.size()) throw Error("masked index out of range");
  std::string out =
      "Complete the missing option in the question below. Reply with the text of the masked "
      "option only.\n\nQuestion: " +
      item.question + "\nOptions:\n";
  for (std::size_t i = 0; i < item.choices.size(); ++i) {
    out += choice_letter(i);
    out += ": ";
    out += (i == masked_index) ? "[MASK]" : item.choices[i];
    if (i + 1 < item.choices.size()) out += '\n';
  }
  return out;
}

}  // namespace bdc::prompts
