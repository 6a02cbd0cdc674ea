// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>

#include "agentft/episode_config.hpp"
#include "agentft/lm.hpp"
#include "agentft/prompts.hpp"
#include "agentft/qa_item.hpp"
#include "agentft/toolbox.hpp"
#include "agentft/trajectory.hpp"

namespace agentft {

/// Seconds on a monotonic clock. Tests and reproducible runs pass a constant.
using EpisodeClock = std::function<double()>;

EpisodeClock steady_clock_seconds();

/// Runs one question to completion or truncation.
///
/// Each round renders the context, asks the model for a thought and action
/// (stopping at the observation marker), parses the action and either calls
/// the tool, finishes with reward = EM against the gold answers, or appends
/// the invalid-action observation. Reflection rounds get the reflection
/// instruction first. Model transport failures propagate as TransportError;
/// tool failures become "None" observations.
Trajectory run_episode(const EpisodeConfig& cfg, const QAItem& item, LanguageModel& lm, Tool& tool,
                       const PromptRegistry& registry = PromptRegistry::bundled(),
                       const EpisodeClock& clock = steady_clock_seconds());

}  // namespace agentft
