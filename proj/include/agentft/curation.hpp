// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "agentft/context.hpp"
#include "agentft/prompts.hpp"
#include "agentft/trajectory.hpp"

namespace agentft {

struct CurationFilters {
  bool require_reward_1 = true;
  int max_rounds = 11;
};

struct PlanEntry {
  Task task = Task::HotpotQA;
  Method method = Method::ReAct;
  std::size_t count = 0;
};

struct CurationPlan {
  std::vector<PlanEntry> entries;
  CurationFilters filters;
  std::uint64_t seed = 0;

  std::size_t total() const;
  /// Throws ConfigError on duplicate (task, method) entries.
  void validate() const;

  /// {"entries": [{"task","method","count"}], "filters": {...}, "seed": n}
  static CurationPlan from_json(const nlohmann::json& j);
  static CurationPlan load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

using PoolKey = std::pair<Task, Method>;
using TrajectoryPools = std::map<PoolKey, std::vector<Trajectory>>;

/// Keeps reward-1 (when required), non-truncated trajectories within the
/// round limit. Order preserved.
std::vector<Trajectory> filter_successful(const std::vector<Trajectory>& trajectories,
                                          const CurationFilters& filters = {});

/// One round: thought = the reasoning, action = finish[answer]; tagged
/// CoTAsReAct, reward kept. Throws ConversionError without an answer.
Trajectory cot_to_react(const Trajectory& cot);

/// Drops later copies of trajectories with the same question and rendered
/// rounds.
std::vector<Trajectory> deduplicate(const std::vector<Trajectory>& trajectories);

/// Groups by (task, base method).
TrajectoryPools make_pools(const std::vector<Trajectory>& trajectories);

/// Exactly `count` per plan entry, drawn by a per-entry seeded prefix sample,
/// then shuffled with the plan seed. Throws PreconditionError naming the
/// entry and shortfall when a pool is too small.
std::vector<Trajectory> mix(const TrajectoryPools& pools, const CurationPlan& plan);

/// "734 trajectories (500 ReAct / 187 CoT / 47 Reflexion)" with methods in
/// first-seen plan order (or enum order when no plan is given).
std::string summarize_counts(const std::vector<Trajectory>& trajectories, const CurationPlan* plan = nullptr);

enum class ExportFormat { ChatMessages, PromptCompletion };

std::string_view to_string(ExportFormat format) noexcept;
ExportFormat parse_export_format(std::string_view name);

struct ExportOptions {
  bool mask_observations = true;
  const PromptRegistry* registry = &PromptRegistry::bundled();
};

/// {"messages": [{"role","content"}, ...]}: system instruction, user question,
/// then an assistant turn per round and a user observation turn for every
/// round but the last. Throws ExportError on ParseFailure rounds.
nlohmann::ordered_json to_chat_record(const Trajectory& trajectory, const ExportOptions& options = {});

/// {"prompt", "completion", "mask_spans": [[start, end], ...]} with spans as
/// byte offsets of observation texts in the completion (empty when masking
/// is off).
nlohmann::ordered_json to_prompt_completion_record(const Trajectory& trajectory, const ExportOptions& options = {});

void export_jsonl(const std::vector<Trajectory>& trajectories, ExportFormat format,
                  const std::filesystem::path& out, const ExportOptions& options = {});

/// Rounds recovered from a chat record (inverse of to_chat_record).
std::vector<Round> rounds_from_chat(const nlohmann::ordered_json& record);

enum class ReviewDecision { Accept, Reject, EditAnswer };

struct ReviewEntry {
  std::string key;
  ReviewDecision decision = ReviewDecision::Accept;
  std::string answer;
};

/// Interactive accept/reject/edit pass over trajectories. Decisions go to a
/// sidecar JSONL as they are made; re-running skips decided items.
class ReviewSession {
 public:
  ReviewSession(std::vector<Trajectory> trajectories, std::filesystem::path sidecar);

  /// Prompts for each undecided trajectory on `out`, reading commands
  /// (a = accept, r = reject, e = edit answer, q = quit) from `in`. Returns
  /// the number of decisions recorded during this call.
  std::size_t run(std::istream& in, std::ostream& out);

  /// 0-based index of the first undecided trajectory.
  std::size_t next_index() const;
  bool complete() const { return next_index() >= trajectories_.size(); }

  /// Accepted trajectories (edits applied), in input order.
  std::vector<Trajectory> curated() const;

 private:
  std::vector<Trajectory> trajectories_;
  std::filesystem::path sidecar_;
  std::map<std::string, ReviewEntry> decisions_;
};

std::vector<ReviewEntry> read_review_sidecar(const std::filesystem::path& sidecar);

/// Replays sidecar decisions over trajectories; undecided ones are dropped.
std::vector<Trajectory> apply_review(const std::vector<Trajectory>& trajectories,
                                     const std::vector<ReviewEntry>& decisions);

}  // namespace agentft
