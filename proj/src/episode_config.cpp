// SPDX-License-Identifier: Apache-2.0
#include "agentft/episode_config.hpp"

#include "agentft/error.hpp"
#include "agentft/prompts.hpp"
#include "agentft/strings.hpp"

namespace agentft {

EpisodeConfig EpisodeConfig::for_method(Method method, Task task) {
  EpisodeConfig cfg;
  cfg.method = method;
  cfg.prompt_set_id = default_prompt_set_id(task, method);
  switch (method) {
    case Method::ReAct:
      cfg.stop_sequences = {"\nObservation"};
      break;
    case Method::Reflexion:
      cfg.reflection_rounds = {6, 10};
      cfg.stop_sequences = {"\nObservation"};
      break;
    case Method::IO:
    case Method::CoT:
    case Method::CoTAsReAct:
      cfg.max_rounds = 1;
      cfg.stop_sequences = {"\nQuestion:"};
      break;
  }
  return cfg;
}

void EpisodeConfig::validate() const {
  std::vector<std::string> problems;
  if (max_rounds < 1) problems.push_back("max_rounds must be at least 1");
  for (int r : reflection_rounds) {
    if (r < 1 || r > max_rounds) problems.push_back("reflection round " + std::to_string(r) + " outside [1, max_rounds]");
  }
  if (!reflection_rounds.empty() && method != Method::Reflexion)
    problems.push_back("reflection_rounds set for a non-Reflexion method");
  if (temperature < 0) problems.push_back("temperature must be non-negative");
  if (max_tokens < 1) problems.push_back("max_tokens must be positive");
  if (stop_sequences.empty()) problems.push_back("stop_sequences must not be empty");
  if (prompt_set_id.empty()) problems.push_back("prompt_set_id is empty");
  if (!problems.empty()) throw ConfigError("episode config: " + strings::join(problems, "; "));
}

double default_temperature(std::string_view model_id) {
  auto lower = strings::to_lower(model_id);
  return lower.find("llama") != std::string::npos ? 0.6 : 0.0;
}

}  // namespace agentft
