// SPDX-License-Identifier: Apache-2.0
#include "agentft/context.hpp"

#include "agentft/strings.hpp"

namespace agentft {
namespace {

constexpr std::string_view kThought = "Thought:";
constexpr std::string_view kAction = "Action:";
constexpr std::string_view kObservation = "Observation:";
constexpr std::string_view kAnswer = "Answer:";

/// Text after `label`, dropping one separating space.
std::string_view after_label(std::string_view line, std::string_view label) {
  line.remove_prefix(label.size());
  if (!line.empty() && line.front() == ' ') line.remove_prefix(1);
  return line;
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

/// Offset of `label` at the start of a line (offset 0 or after '\n').
std::size_t find_line_label(std::string_view text, std::string_view label, std::size_t from = 0) {
  if (from == 0 && starts_with(text, label)) return 0;
  std::string needle = "\n" + std::string(label);
  auto pos = text.find(needle, from == 0 ? 0 : from - 1);
  return pos == std::string_view::npos ? pos : pos + 1;
}

std::string_view strip_thought_label(std::string_view text) {
  text = strings::trim(text);
  if (starts_with(text, kThought)) text = after_label(text, kThought);
  return text;
}

std::string_view first_line(std::string_view text) {
  auto nl = text.find('\n');
  return nl == std::string_view::npos ? text : text.substr(0, nl);
}

}  // namespace

std::string render_round(const Round& round) {
  std::string out;
  if (round.is_reflection) {
    out += kReflectionInstruction;
    out += '\n';
  }
  out += "Thought: " + round.thought + "\n";
  out += "Action: " + round.action_raw + "\n";
  if (round.observation) out += "Observation: " + *round.observation + "\n";
  return out;
}

std::string render_context(const PromptSet& prompt_set, bool zero_shot, std::string_view question,
                           std::span<const Round> partial) {
  std::string out = prompt_set.instruction;
  if (!zero_shot) out += prompt_set.render_exemplars();
  out += "Question: ";
  out += question;
  out += '\n';
  for (const auto& r : partial) out += render_round(r);
  return out;
}

std::string render_context(const EpisodeConfig& cfg, const PromptRegistry& registry, std::string_view question,
                           std::span<const Round> partial) {
  return render_context(registry.get(cfg.prompt_set_id), cfg.zero_shot, question, partial);
}

std::vector<Round> parse_rounds(std::string_view text) {
  enum class State { Preamble, Thought, Action, Observation };

  auto lines = strings::split_lines(text);
  std::size_t start = 0;
  for (std::size_t i = 0; i < lines.size(); ++i)
    if (starts_with(lines[i], "Question:")) start = i + 1;

  std::vector<Round> rounds;
  State state = State::Preamble;
  bool reflect = false;
  std::string thought;
  std::optional<std::string> action_raw;

  auto close_pending = [&] {
    if (state == State::Thought || state == State::Action) {
      rounds.push_back(Round::from_action_line(std::move(thought), action_raw.value_or("")));
      rounds.back().is_reflection = reflect;
      reflect = false;
    }
    thought.clear();
    action_raw.reset();
  };

  for (std::size_t i = start; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (line == kReflectionInstruction) {
      close_pending();
      reflect = true;
      state = State::Preamble;
    } else if (starts_with(line, kThought)) {
      close_pending();
      thought = std::string(after_label(line, kThought));
      state = State::Thought;
    } else if (starts_with(line, kAction) && state == State::Thought) {
      action_raw = std::string(after_label(line, kAction));
      state = State::Action;
    } else if (starts_with(line, kObservation) && state == State::Action) {
      rounds.push_back(Round::from_action_line(std::move(thought), action_raw.value_or("")));
      rounds.back().observation = std::string(after_label(line, kObservation));
      rounds.back().is_reflection = reflect;
      reflect = false;
      thought.clear();
      action_raw.reset();
      state = State::Observation;
    } else if (state == State::Thought) {
      thought += '\n';
      thought += line;
    } else if (state == State::Observation && !rounds.empty()) {
      *rounds.back().observation += '\n';
      *rounds.back().observation += line;
    }
  }
  close_pending();
  return rounds;
}

Round parse_react_step(std::string_view output) {
  std::string_view text = strip_thought_label(output);
  auto pos = find_line_label(text, kAction);
  if (pos == std::string_view::npos) return Round::from_action_line(std::string(strings::trim(text)), "");
  std::string thought(strings::trim(text.substr(0, pos)));
  std::string action(strings::trim(first_line(after_label(text.substr(pos), kAction))));
  return Round::from_action_line(std::move(thought), std::move(action));
}

Round parse_answer_step(std::string_view output) {
  std::string_view text = strip_thought_label(output);
  auto pos = find_line_label(text, kAnswer);
  if (pos != std::string_view::npos) {
    std::string answer(strings::trim(first_line(after_label(text.substr(pos), kAnswer))));
    Round r;
    r.thought = std::string(strings::trim(text.substr(0, pos)));
    r.action = Action::finish(answer);
    r.action_raw = "finish[" + answer + "]";
    return r;
  }
  // Models sometimes answer in ReAct form even under a CoT prompt.
  Round r = parse_react_step(output);
  if (r.is_finish()) return r;
  return Round::from_action_line(std::string(strings::trim(text)), "");
}

std::string system_text(const PromptSet& prompt_set, bool zero_shot) {
  std::string out = prompt_set.instruction;
  if (!zero_shot) out += prompt_set.render_exemplars();
  while (!out.empty() && out.back() == '\n') out.pop_back();
  return out;
}

std::vector<ChatMessage> render_messages(std::string_view system, std::string_view question,
                                         std::span<const Round> rounds, bool reflect_next) {
  std::vector<ChatMessage> messages;
  if (!system.empty()) messages.push_back({"system", std::string(system)});
  std::string user = "Question: " + std::string(question);
  for (const auto& r : rounds) {
    if (r.is_reflection) {
      user += '\n';
      user += kReflectionInstruction;
    }
    messages.push_back({"user", std::move(user)});
    user.clear();
    messages.push_back({"assistant", "Thought: " + r.thought + "\nAction: " + r.action_raw});
    if (r.observation) user = "Observation: " + *r.observation;
  }
  if (reflect_next) {
    user += '\n';
    user += kReflectionInstruction;
  }
  if (!user.empty()) messages.push_back({"user", std::move(user)});
  return messages;
}

}  // namespace agentft
