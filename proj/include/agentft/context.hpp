// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agentft/episode_config.hpp"
#include "agentft/prompts.hpp"
#include "agentft/trajectory.hpp"

namespace agentft {

inline constexpr std::string_view kReflectionInstruction =
    "Reflection: The approach so far has not produced the answer. Reconsider the strategy and "
    "state a revised plan.";

inline constexpr std::string_view kInvalidActionObservation =
    "Invalid action. Valid actions are search[question] or finish[answer].";

struct ChatMessage {
  std::string role;
  std::string content;
  bool operator==(const ChatMessage&) const = default;
};

/// "Thought: ...\nAction: ...\n[Observation: ...\n]", preceded by the
/// reflection line when the round is a reflection.
std::string render_round(const Round& round);

/// Instruction, exemplars (unless zero-shot), the question, then the rounds.
/// Throws ConfigError when `cfg.prompt_set_id` is unknown.
std::string render_context(const EpisodeConfig& cfg, const PromptRegistry& registry,
                           std::string_view question, std::span<const Round> partial);

/// Rendering of an already-resolved prompt set.
std::string render_context(const PromptSet& prompt_set, bool zero_shot, std::string_view question,
                           std::span<const Round> partial);

/// Inverse of the round section of render_context: text starting at the
/// first "Thought:" line back into rounds.
std::vector<Round> parse_rounds(std::string_view text);

/// Model output for one ReAct step ("Thought: ...\nAction: ...") as a round
/// without observation.
Round parse_react_step(std::string_view output);

/// Model output for CoT/IO ("[Thought: ...\n]Answer: ...") as a one-round
/// finish; a missing answer line yields a ParseFailure round.
Round parse_answer_step(std::string_view output);

/// System text for chat layouts: instruction plus, unless zero-shot, the
/// exemplars.
std::string system_text(const PromptSet& prompt_set, bool zero_shot);

/// Chat layout of an episode: system, user question, then per round an
/// assistant turn and (when observed) a user observation turn. Reflection
/// instructions ride on the user turn that precedes the reflecting round;
/// `reflect_next` appends one for the round about to be generated.
std::vector<ChatMessage> render_messages(std::string_view system, std::string_view question,
                                         std::span<const Round> rounds, bool reflect_next = false);

}  // namespace agentft
