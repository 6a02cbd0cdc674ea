// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "agentft/action.hpp"
#include "agentft/types.hpp"

namespace agentft {

using Json = nlohmann::ordered_json;

/// One thought-action-observation step. `action_raw` is the action line as the
/// model wrote it; `action` is its parse.
struct Round {
  std::string thought;
  std::string action_raw;
  ParsedAction action = ParseFailure{};
  std::optional<std::string> observation;
  bool is_reflection = false;

  /// Parses `action_line` into `action`.
  static Round from_action_line(std::string thought, std::string action_line);

  bool is_finish() const noexcept;
  bool is_parse_failure() const noexcept { return std::holds_alternative<ParseFailure>(action); }

  bool operator==(const Round&) const = default;
};

struct Trajectory {
  std::string question_id;
  std::string question;
  Task task = Task::HotpotQA;
  Method method = Method::ReAct;
  std::vector<Round> rounds;
  std::optional<std::string> final_answer;
  int reward = 0;
  bool truncated = false;
  TokenUsage usage;
  double wall_time_s = 0.0;

  bool operator==(const Trajectory&) const = default;
};

Json to_json(const Round& round);
Round round_from_json(const Json& j);
Json to_json(const Trajectory& trajectory);
Trajectory trajectory_from_json(const Json& j);

/// One JSON record per line. Throws LoadError naming the line on bad input.
std::vector<Trajectory> read_trajectories(const std::filesystem::path& path);
void write_trajectories(const std::filesystem::path& path, const std::vector<Trajectory>& trajectories);
void append_trajectory(const std::filesystem::path& path, const Trajectory& trajectory);

/// Stable content key over question and rendered rounds; used for
/// deduplication and review decisions.
std::string content_key(const Trajectory& trajectory);

}  // namespace agentft
