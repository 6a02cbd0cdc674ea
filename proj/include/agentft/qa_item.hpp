// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "agentft/types.hpp"

namespace agentft {

enum class AnswerStyle { Span, YesNo, MultiChoice };

std::string_view to_string(AnswerStyle style) noexcept;

struct Choice {
  char letter;
  std::string text;
  bool operator==(const Choice&) const = default;
};

/// A dataset question. For MultiChoice items `question` is already rendered
/// with the preamble and lettered options, and the gold answer is a letter.
struct QAItem {
  std::string question_id;
  Task task = Task::HotpotQA;
  std::string question;
  std::vector<std::string> gold_answers;
  AnswerStyle answer_style = AnswerStyle::Span;
  std::vector<Choice> choices;

  bool operator==(const QAItem&) const = default;
};

}  // namespace agentft
