// SPDX-License-Identifier: Apache-2.0
#include "agentft/trajectory.hpp"

#include "agentft/context.hpp"
#include "agentft/error.hpp"
#include "agentft/jsonl.hpp"
#include "agentft/strings.hpp"

namespace agentft {

Round Round::from_action_line(std::string thought, std::string action_line) {
  Round round;
  round.thought = std::move(thought);
  round.action = parse_action(action_line);
  round.action_raw = std::move(action_line);
  return round;
}

bool Round::is_finish() const noexcept {
  const auto* a = std::get_if<Action>(&action);
  return a && a->is_finish();
}

Json to_json(const Round& round) {
  Json action;
  if (const auto* a = std::get_if<Action>(&round.action)) {
    action["type"] = to_string(a->kind());
    action["payload"] = a->payload();
  } else {
    action["type"] = "invalid";
    action["payload"] = std::get<ParseFailure>(round.action).raw;
  }
  Json j;
  j["thought"] = round.thought;
  j["action_raw"] = round.action_raw;
  j["action"] = std::move(action);
  j["observation"] = round.observation ? Json(*round.observation) : Json(nullptr);
  j["is_reflection"] = round.is_reflection;
  return j;
}

Round round_from_json(const Json& j) {
  Round round;
  round.thought = j.at("thought").get<std::string>();
  round.action_raw = j.at("action_raw").get<std::string>();
  const auto& action = j.at("action");
  auto type = action.at("type").get<std::string>();
  auto payload = action.at("payload").get<std::string>();
  if (type == "search") {
    round.action = Action::search(payload);
  } else if (type == "finish") {
    round.action = Action::finish(payload);
  } else if (type == "invalid") {
    round.action = ParseFailure{payload};
  } else {
    throw LoadError("unknown action type '" + type + "'");
  }
  if (auto it = j.find("observation"); it != j.end() && !it->is_null()) round.observation = it->get<std::string>();
  round.is_reflection = j.value("is_reflection", false);
  return round;
}

Json to_json(const Trajectory& t) {
  Json j;
  j["question_id"] = t.question_id;
  j["question"] = t.question;
  j["task"] = to_string(t.task);
  j["method"] = to_string(t.method);
  Json rounds = Json::array();
  for (const auto& r : t.rounds) rounds.push_back(to_json(r));
  j["rounds"] = std::move(rounds);
  j["final_answer"] = t.final_answer ? Json(*t.final_answer) : Json(nullptr);
  j["reward"] = t.reward;
  j["truncated"] = t.truncated;
  j["usage"] = {{"prompt_tokens", t.usage.prompt_tokens}, {"completion_tokens", t.usage.completion_tokens}};
  j["wall_time_s"] = t.wall_time_s;
  return j;
}

Trajectory trajectory_from_json(const Json& j) {
  Trajectory t;
  try {
    t.question_id = j.at("question_id").get<std::string>();
    t.question = j.at("question").get<std::string>();
    t.task = parse_task(j.at("task").get<std::string>());
    t.method = parse_method(j.at("method").get<std::string>());
    for (const auto& r : j.at("rounds")) t.rounds.push_back(round_from_json(r));
    if (auto it = j.find("final_answer"); it != j.end() && !it->is_null()) t.final_answer = it->get<std::string>();
    t.reward = j.at("reward").get<int>();
    t.truncated = j.at("truncated").get<bool>();
    if (auto it = j.find("usage"); it != j.end()) {
      t.usage.prompt_tokens = it->value("prompt_tokens", std::int64_t{0});
      t.usage.completion_tokens = it->value("completion_tokens", std::int64_t{0});
    }
    t.wall_time_s = j.value("wall_time_s", 0.0);
  } catch (const Json::exception& e) {
    throw LoadError(std::string("trajectory record: ") + e.what());
  } catch (const ConfigError& e) {
    throw LoadError(std::string("trajectory record: ") + e.what());
  }
  return t;
}

std::vector<Trajectory> read_trajectories(const std::filesystem::path& path) {
  std::vector<Trajectory> out;
  jsonl::for_each(path, [&](const Json& j, std::size_t line) {
    try {
      out.push_back(trajectory_from_json(j));
    } catch (const LoadError& e) {
      throw LoadError(path.string() + ":" + std::to_string(line) + ": " + e.what());
    }
  });
  return out;
}

void write_trajectories(const std::filesystem::path& path, const std::vector<Trajectory>& trajectories) {
  std::vector<Json> records;
  records.reserve(trajectories.size());
  for (const auto& t : trajectories) records.push_back(to_json(t));
  jsonl::write(path, records);
}

void append_trajectory(const std::filesystem::path& path, const Trajectory& trajectory) {
  jsonl::append(path, to_json(trajectory));
}

std::string content_key(const Trajectory& trajectory) {
  std::uint64_t h = strings::fnv1a(trajectory.question);
  h = strings::fnv1a("\x1f", h);
  for (const auto& r : trajectory.rounds) h = strings::fnv1a(render_round(r), h);
  return strings::hex64(h);
}

}  // namespace agentft
