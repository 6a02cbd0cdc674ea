// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "agentft/agent.hpp"
#include "agentft/curation.hpp"
#include "agentft/metrics.hpp"
#include "agentft/pricing.hpp"

namespace agentft {

/// One evaluated question, as written to the per-item results JSONL.
struct ItemRecord {
  std::string question_id;
  Task task = Task::HotpotQA;
  Method method = Method::ReAct;
  std::string prediction;
  std::vector<std::string> gold;
  int em = 0;
  double f1 = 0.0;
  int rounds = 0;
  bool truncated = false;
  TokenUsage usage;
  double wall_time_s = 0.0;
  bool error = false;
  std::string error_message;
};

nlohmann::ordered_json to_json(const ItemRecord& record);
ItemRecord item_record_from_json(const nlohmann::ordered_json& j);
std::vector<ItemRecord> read_item_records(const std::filesystem::path& path);

ItemRecord make_item_record(const QAItem& item, const Trajectory& trajectory);
ItemRecord make_error_record(const QAItem& item, Method method, const std::string& message);

struct CostModel {
  std::string model;
  bool fine_tuned = false;
  PriceTable prices;
};

struct MetricReport {
  double em = 0.0;
  double f1 = 0.0;
  std::size_t n = 0;
  double sigma_m = 0.0;
  double turn_mu = 0.0;
  double turn_sigma = 0.0;
  std::optional<double> cost_per_trial;
  double time_per_trial = 0.0;
  std::size_t errors = 0;
  TokenUsage usage;
  std::map<int, std::size_t> turn_histogram;

  nlohmann::ordered_json to_json() const;
  static MetricReport from_json(const nlohmann::ordered_json& j);
};

/// Pure function of the records: percentages for EM/F1, σ_M from EM and n,
/// turn μ/σ over round counts, per-trial cost and wall time means.
MetricReport aggregate(std::span<const ItemRecord> records, const CostModel* cost = nullptr);

struct EvalOptions {
  std::size_t concurrency = 1;
  EpisodeClock clock = steady_clock_seconds();
  const PromptRegistry* registry = &PromptRegistry::bundled();
  /// Per-item records are appended here in item order as they complete.
  std::optional<std::filesystem::path> records_path;
  const CostModel* cost = nullptr;
};

struct EvalResult {
  MetricReport report;
  std::vector<ItemRecord> records;
  std::vector<Trajectory> trajectories;
};

/// Episode errors become em-0 records flagged `error`; the batch continues.
EvalResult run_eval(const EpisodeConfig& cfg, const std::vector<QAItem>& items, LanguageModel& lm, Tool& tool,
                    const EvalOptions& options = {});

struct RobustnessResult {
  MetricReport normal;
  MetricReport none;
  MetricReport random;
};

/// Normal, then "None", then random-observation runs over the same items.
/// The normal run feeds `pool`, which the random run samples from.
RobustnessResult robustness_sweep(const EpisodeConfig& cfg, const std::vector<QAItem>& items, LanguageModel& lm,
                                  std::shared_ptr<Tool> tool, std::shared_ptr<ObservationPool> pool,
                                  const PerturbationConfig& perturbation, const EvalOptions& options = {});

struct ScalingStep {
  std::size_t size = 0;
  std::filesystem::path plan_path;
  std::filesystem::path export_path;
  std::optional<MetricReport> report;
};

/// Evaluates a fine-tuned endpoint trained on one scaling export.
using ScalingEvaluator = std::function<MetricReport(const ScalingStep&)>;

/// For each size: a nested prefix sample of the curated pool, its plan JSON
/// and its export file under `out_dir`. Throws PreconditionError for a zero
/// size or a pool smaller than the largest size.
std::vector<ScalingStep> scaling_sweep(const std::vector<Trajectory>& curated, std::span<const std::size_t> sizes,
                                       std::uint64_t seed, const std::filesystem::path& out_dir,
                                       ExportFormat format = ExportFormat::ChatMessages,
                                       const ExportOptions& export_options = {},
                                       const ScalingEvaluator& evaluate = nullptr);

/// Columns are the named record sets, rows the questions they share in the
/// first set's order. Throws PreconditionError when question sets differ.
ResultMatrix matrix_from_records(const std::vector<std::pair<std::string, std::vector<ItemRecord>>>& runs);

struct ReportRow {
  std::string label;
  MetricReport report;
};

std::string markdown_metrics_table(std::span<const ReportRow> rows);
std::string markdown_cost_table(std::span<const ReportRow> rows);
std::string markdown_robustness_table(std::span<const std::pair<std::string, RobustnessResult>> rows);
std::string markdown_bounds_table(const MethodChoiceBounds& bounds, const std::vector<std::string>& methods);
std::string histogram_csv(const std::map<int, std::size_t>& histogram);

}  // namespace agentft
