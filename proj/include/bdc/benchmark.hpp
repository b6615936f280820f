#pragma once
// Benchmark items: multiple-choice or open-ended questions, with the
// provenance fields updated copies carry (origin_id, applied_strategies).

#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "bdc/errors.hpp"

namespace bdc {

enum class QuestionType { MultipleChoice, OpenEnded };

inline const char* to_string(QuestionType t) {
  return t == QuestionType::MultipleChoice ? "multiple_choice" : "open_ended";
}

inline QuestionType question_type_from_string(const std::string& s) {
  if (s == "multiple_choice") return QuestionType::MultipleChoice;
  if (s == "open_ended") return QuestionType::OpenEnded;
  throw FormatError("unknown question type: " + s);
}

inline char choice_letter(std::size_t index) {
  if (index >= 26) throw Error("choice index beyond Z");
  return static_cast<char>('A' + index);
}

struct BenchmarkItem {
  std::string question_id;
  std::string question;
  QuestionType question_type = QuestionType::MultipleChoice;
  std::vector<std::string> choices;  // empty for open-ended items
  int answer_index = -1;             // multiple choice: index into choices
  std::string answer_text;           // open-ended gold answer
  std::optional<std::string> origin_id;
  std::vector<std::string> applied_strategies;

  const std::string& answer_choice() const {
    if (question_type != QuestionType::MultipleChoice)
      throw NotMultipleChoice("item has no choices: " + question_id);
    return choices.at(static_cast<std::size_t>(answer_index));
  }

  void validate() const {
    if (question_id.empty()) throw FormatError("item without question_id");
    if (question.empty()) throw FormatError("empty question: " + question_id);
    if (question_type == QuestionType::MultipleChoice) {
      if (choices.size() < 2) throw FormatError("multiple choice needs >= 2 choices: " + question_id);
      if (choices.size() > 26) throw FormatError("more than 26 choices: " + question_id);
      if (answer_index < 0 || static_cast<std::size_t>(answer_index) >= choices.size())
        throw FormatError("answer index out of range: " + question_id);
      for (const auto& c : choices)
        if (c.empty()) throw FormatError("empty choice text: " + question_id);
    } else {
      if (!choices.empty()) throw FormatError("open-ended item with choices: " + question_id);
      if (answer_text.empty()) throw FormatError("open-ended item without answer: " + question_id);
    }
  }
};

struct Benchmark {
  std::string benchmark_id;
  std::vector<BenchmarkItem> items;

  void validate() const {
    if (benchmark_id.empty()) throw FormatError("benchmark without id");
    if (items.empty()) throw EmptyInput("benchmark has no items: " + benchmark_id);
    std::unordered_set<std::string> seen;
    for (const auto& it : items) {
      it.validate();
      if (!seen.insert(it.question_id).second)
        throw FormatError("duplicate question_id: " + it.question_id);
    }
  }
};

}  // namespace bdc
