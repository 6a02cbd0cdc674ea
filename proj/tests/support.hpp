// SPDX-License-Identifier: Apache-2.0
// Shared fixtures for the unit and acceptance tests.
#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "agentft/agent.hpp"
#include "agentft/lm.hpp"
#include "agentft/prompts.hpp"
#include "agentft/toolbox.hpp"
#include "agentft/trajectory.hpp"

namespace agentft::testing {

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("agentft-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream(path, std::ios::binary) << text;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::size_t count_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) ++n;
  return n;
}

/// Model responses and search fixtures that replay a ReAct exemplar.
struct ExemplarReplay {
  QAItem item;
  std::vector<std::string> responses;
  std::map<std::string, std::string> observations;
};

inline ExemplarReplay replay_of(const Exemplar& ex) {
  ExemplarReplay r;
  r.item = ex.item;
  r.item.gold_answers = {ex.answer};
  for (const auto& round : ex.rounds) {
    r.responses.push_back("Thought: " + round.thought + "\nAction: " + round.action_raw);
    if (const auto* a = std::get_if<Action>(&round.action); a && !a->is_finish() && round.observation)
      r.observations[a->payload()] = *round.observation;
  }
  return r;
}

inline Round search_round(std::string thought, std::string query, std::string observation) {
  Round r = Round::from_action_line(std::move(thought), "search[" + query + "]");
  r.observation = std::move(observation);
  return r;
}

inline Round finish_round(std::string thought, std::string answer) {
  return Round::from_action_line(std::move(thought), "finish[" + answer + "]");
}

/// A curated-looking trajectory with `searches` search rounds then a finish.
inline Trajectory synthetic_trajectory(std::string id, Task task, Method method, int searches, int reward = 1) {
  Trajectory t;
  t.question_id = id;
  t.question = "Question " + id + "?";
  t.task = task;
  t.method = method;
  for (int i = 0; i < searches; ++i)
    t.rounds.push_back(search_round("Step " + std::to_string(i) + " for " + id, "query " + std::to_string(i) + " " + id,
                                    "observation " + std::to_string(i) + " of " + id));
  t.rounds.push_back(finish_round("Done with " + id, "answer " + id));
  t.final_answer = "answer " + id;
  t.reward = reward;
  return t;
}

inline EpisodeClock zero_clock() {
  return [] { return 0.0; };
}

}  // namespace agentft::testing
