// SPDX-License-Identifier: Apache-2.0
#include "agentft/types.hpp"

#include <array>
#include <utility>

#include "agentft/error.hpp"
#include "agentft/qa_item.hpp"
#include "agentft/strings.hpp"

namespace agentft {
namespace {

constexpr std::array<std::pair<Task, std::string_view>, 4> kTasks{{
    {Task::HotpotQA, "HotpotQA"},
    {Task::Bamboogle, "Bamboogle"},
    {Task::StrategyQA, "StrategyQA"},
    {Task::MMLU, "MMLU"},
}};

constexpr std::array<std::pair<Method, std::string_view>, 5> kMethods{{
    {Method::IO, "IO"},
    {Method::CoT, "CoT"},
    {Method::ReAct, "ReAct"},
    {Method::Reflexion, "Reflexion"},
    {Method::CoTAsReAct, "CoT-as-ReAct"},
}};

}  // namespace

std::string_view to_string(Task task) noexcept {
  for (auto& [t, name] : kTasks)
    if (t == task) return name;
  return "?";
}

std::string_view to_string(Method method) noexcept {
  for (auto& [m, name] : kMethods)
    if (m == method) return name;
  return "?";
}

Task parse_task(std::string_view name) {
  for (auto& [t, n] : kTasks)
    if (strings::iequals(n, name)) return t;
  throw ConfigError("unknown task '" + std::string(name) + "'");
}

Method parse_method(std::string_view name) {
  for (auto& [m, n] : kMethods)
    if (strings::iequals(n, name)) return m;
  throw ConfigError("unknown method '" + std::string(name) + "'");
}

Method base_method(Method method) noexcept {
  return method == Method::CoTAsReAct ? Method::CoT : method;
}

std::string_view to_string(AnswerStyle style) noexcept {
  switch (style) {
    case AnswerStyle::Span: return "span";
    case AnswerStyle::YesNo: return "yes_no";
    case AnswerStyle::MultiChoice: return "multi_choice";
  }
  return "?";
}

}  // namespace agentft
