// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace agentft {

enum class Task { HotpotQA, Bamboogle, StrategyQA, MMLU };

/// Prompting method a trajectory was produced with. `CoTAsReAct` tags a
/// chain-of-thought trajectory reformatted as a one-round ReAct trajectory.
enum class Method { IO, CoT, ReAct, Reflexion, CoTAsReAct };

std::string_view to_string(Task task) noexcept;
std::string_view to_string(Method method) noexcept;

/// Case-insensitive; throws ConfigError on unknown names.
Task parse_task(std::string_view name);
Method parse_method(std::string_view name);

/// Method family used for curation pools and summaries (CoTAsReAct -> CoT).
Method base_method(Method method) noexcept;

struct TokenUsage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;

  TokenUsage& operator+=(const TokenUsage& other) noexcept {
    prompt_tokens += other.prompt_tokens;
    completion_tokens += other.completion_tokens;
    return *this;
  }
  friend TokenUsage operator+(TokenUsage a, const TokenUsage& b) noexcept { return a += b; }
  bool operator==(const TokenUsage&) const = default;
};

}  // namespace agentft
