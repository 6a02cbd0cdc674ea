// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "agentft/types.hpp"

namespace agentft {

struct EpisodeConfig {
  Method method = Method::ReAct;
  int max_rounds = 11;
  /// 1-based rounds preceded by the reflection instruction. Empty for
  /// Reflexion means reflections are left to the model.
  std::set<int> reflection_rounds;
  std::vector<std::string> stop_sequences;
  double temperature = 0.0;
  int max_tokens = 512;
  std::string prompt_set_id;
  bool zero_shot = false;

  /// Defaults for a method: Reflexion reflects before rounds 6 and 10; CoT
  /// and IO answer in a single round.
  static EpisodeConfig for_method(Method method, Task task = Task::HotpotQA);

  /// Throws ConfigError when the invariants do not hold.
  void validate() const;
};

/// Generation temperature used for a model family at evaluation time.
double default_temperature(std::string_view model_id);

}  // namespace agentft
