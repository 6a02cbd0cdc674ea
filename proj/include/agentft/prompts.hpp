// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "agentft/qa_item.hpp"
#include "agentft/trajectory.hpp"
#include "agentft/types.hpp"

namespace agentft {

/// A worked few-shot example. ReAct exemplars carry rounds; CoT exemplars a
/// single thought; IO exemplars only the answer.
struct Exemplar {
  QAItem item;
  std::string thought;
  std::vector<Round> rounds;
  std::string answer;
};

/// Prompt layout for one (task family, method). Reflexion uses the ReAct set.
struct PromptSet {
  std::string id;
  Method method = Method::ReAct;
  std::string instruction;
  std::string exemplar_header;
  std::vector<Exemplar> exemplars;

  /// Few-shot block as it appears in a prompted context.
  std::string render_exemplars() const;
};

class PromptRegistry {
 public:
  /// Registry preloaded with the HotpotQA, StrategyQA and MMLU prompt sets
  /// for IO, CoT and ReAct.
  static const PromptRegistry& bundled();

  void add(PromptSet set);
  bool contains(std::string_view id) const;
  /// Throws ConfigError for unknown ids.
  const PromptSet& get(std::string_view id) const;
  std::vector<std::string> ids() const;

 private:
  std::map<std::string, PromptSet, std::less<>> sets_;
};

/// e.g. (Bamboogle, Reflexion) -> "hotpotqa-react".
std::string default_prompt_set_id(Task task, Method method);

/// Observation shown after a finishing action inside few-shot exemplars.
inline constexpr std::string_view kExemplarFinishObservation = "Episode finished, reward = 1";

}  // namespace agentft
