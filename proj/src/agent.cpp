// SPDX-License-Identifier: Apache-2.0
#include "agentft/agent.hpp"

#include <chrono>

#include <spdlog/spdlog.h>

#include "agentft/context.hpp"
#include "agentft/metrics.hpp"

namespace agentft {
namespace {

bool answers_in_one_step(Method method) {
  return method == Method::IO || method == Method::CoT || method == Method::CoTAsReAct;
}

std::string observe(Tool& tool, const std::string& query) {
  try {
    return tool.search(query);
  } catch (const std::exception& e) {
    spdlog::warn("search '{}' failed: {}", query, e.what());
    return std::string(kNoneObservation);
  }
}

}  // namespace

EpisodeClock steady_clock_seconds() {
  return [] {
    auto now = std::chrono::steady_clock::now().time_since_epoch();
    return std::chrono::duration<double>(now).count();
  };
}

Trajectory run_episode(const EpisodeConfig& cfg, const QAItem& item, LanguageModel& lm, Tool& tool,
                       const PromptRegistry& registry, const EpisodeClock& clock) {
  cfg.validate();
  const PromptSet& prompt_set = registry.get(cfg.prompt_set_id);
  const std::string system = system_text(prompt_set, cfg.zero_shot);
  const bool one_step = answers_in_one_step(cfg.method);

  Trajectory t;
  t.question_id = item.question_id;
  t.question = item.question;
  t.task = item.task;
  t.method = cfg.method;
  t.truncated = true;
  const double started = clock();

  for (int index = 1; index <= cfg.max_rounds; ++index) {
    const bool reflect = cfg.reflection_rounds.count(index) > 0;

    GenerationRequest request;
    request.prompt = render_context(prompt_set, cfg.zero_shot, item.question, t.rounds);
    if (reflect) {
      request.prompt += kReflectionInstruction;
      request.prompt += '\n';
    }
    request.messages = render_messages(system, item.question, t.rounds, reflect);
    request.temperature = cfg.temperature;
    request.max_tokens = cfg.max_tokens;
    request.stop = cfg.stop_sequences;

    Generation generation = lm.generate(request);
    t.usage += generation.usage;

    Round round = one_step ? parse_answer_step(generation.text) : parse_react_step(generation.text);
    round.is_reflection = reflect;

    if (const auto* action = std::get_if<Action>(&round.action); action && action->is_finish()) {
      t.final_answer = action->payload();
      t.reward = score_answer(*t.final_answer, item).em;
      t.truncated = false;
      t.rounds.push_back(std::move(round));
      break;
    }
    // The last allowed round ends the episode without consulting the tool.
    if (one_step || index == cfg.max_rounds) {
      t.rounds.push_back(std::move(round));
      break;
    }
    if (const auto* action = std::get_if<Action>(&round.action)) {
      round.observation = observe(tool, action->payload());
    } else {
      round.observation = std::string(kInvalidActionObservation);
    }
    t.rounds.push_back(std::move(round));
  }

  t.wall_time_s = clock() - started;
  return t;
}

}  // namespace agentft
