// SPDX-License-Identifier: Apache-2.0
#include "agentft/evaluation.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "agentft/error.hpp"
#include "agentft/executor.hpp"
#include "agentft/jsonl.hpp"
#include "agentft/rng.hpp"

namespace agentft {
namespace {

std::string fixed(double value, int decimals) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(decimals) << round_to(value, decimals);
  return out.str();
}

std::filesystem::path with_suffix(const std::filesystem::path& path, const std::string& suffix) {
  return path.parent_path() / (path.stem().string() + "-" + suffix + path.extension().string());
}

EvalOptions for_run(const EvalOptions& base, const std::string& suffix) {
  EvalOptions options = base;
  if (options.records_path) options.records_path = with_suffix(*options.records_path, suffix);
  return options;
}

}  // namespace

nlohmann::ordered_json to_json(const ItemRecord& r) {
  nlohmann::ordered_json j;
  j["question_id"] = r.question_id;
  j["task"] = to_string(r.task);
  j["method"] = to_string(r.method);
  j["prediction"] = r.prediction;
  j["gold"] = r.gold;
  j["em"] = r.em;
  j["f1"] = r.f1;
  j["rounds"] = r.rounds;
  j["truncated"] = r.truncated;
  j["usage"] = {{"prompt_tokens", r.usage.prompt_tokens}, {"completion_tokens", r.usage.completion_tokens}};
  j["wall_time_s"] = r.wall_time_s;
  j["error"] = r.error;
  if (r.error) j["error_message"] = r.error_message;
  return j;
}

ItemRecord item_record_from_json(const nlohmann::ordered_json& j) {
  ItemRecord r;
  try {
    r.question_id = j.at("question_id").get<std::string>();
    r.task = parse_task(j.at("task").get<std::string>());
    r.method = parse_method(j.at("method").get<std::string>());
    r.prediction = j.value("prediction", "");
    r.gold = j.at("gold").get<std::vector<std::string>>();
    r.em = j.at("em").get<int>();
    r.f1 = j.at("f1").get<double>();
    r.rounds = j.value("rounds", 0);
    r.truncated = j.value("truncated", false);
    if (auto u = j.find("usage"); u != j.end()) {
      r.usage.prompt_tokens = u->value("prompt_tokens", std::int64_t{0});
      r.usage.completion_tokens = u->value("completion_tokens", std::int64_t{0});
    }
    r.wall_time_s = j.value("wall_time_s", 0.0);
    r.error = j.value("error", false);
    r.error_message = j.value("error_message", "");
  } catch (const nlohmann::ordered_json::exception& e) {
    throw LoadError(std::string("item record: ") + e.what());
  } catch (const ConfigError& e) {
    throw LoadError(std::string("item record: ") + e.what());
  }
  if (r.em != 0 && r.em != 1) throw LoadError("item record " + r.question_id + ": em must be 0 or 1");
  return r;
}

std::vector<ItemRecord> read_item_records(const std::filesystem::path& path) {
  std::vector<ItemRecord> out;
  jsonl::for_each(path, [&](const Json& j, std::size_t line) {
    try {
      out.push_back(item_record_from_json(j));
    } catch (const LoadError& e) {
      throw LoadError(path.string() + ":" + std::to_string(line) + ": " + e.what());
    }
  });
  return out;
}

ItemRecord make_item_record(const QAItem& item, const Trajectory& t) {
  ItemRecord r;
  r.question_id = item.question_id;
  r.task = item.task;
  r.method = t.method;
  r.prediction = t.final_answer.value_or("");
  r.gold = item.gold_answers;
  if (t.final_answer) {
    auto score = score_answer(*t.final_answer, item);
    r.em = score.em;
    r.f1 = score.f1;
  }
  r.rounds = static_cast<int>(t.rounds.size());
  r.truncated = t.truncated;
  r.usage = t.usage;
  r.wall_time_s = t.wall_time_s;
  return r;
}

ItemRecord make_error_record(const QAItem& item, Method method, const std::string& message) {
  ItemRecord r;
  r.question_id = item.question_id;
  r.task = item.task;
  r.method = method;
  r.gold = item.gold_answers;
  r.error = true;
  r.error_message = message;
  return r;
}

nlohmann::ordered_json MetricReport::to_json() const {
  nlohmann::ordered_json hist = nlohmann::ordered_json::object();
  for (const auto& [rounds, count] : turn_histogram) hist[std::to_string(rounds)] = count;
  nlohmann::ordered_json j;
  j["em"] = em;
  j["f1"] = f1;
  j["n"] = n;
  j["sigma_m"] = sigma_m;
  j["turn_mu"] = turn_mu;
  j["turn_sigma"] = turn_sigma;
  j["cost_per_trial"] = cost_per_trial ? nlohmann::ordered_json(*cost_per_trial) : nlohmann::ordered_json(nullptr);
  j["time_per_trial"] = time_per_trial;
  j["errors"] = errors;
  j["usage"] = {{"prompt_tokens", usage.prompt_tokens}, {"completion_tokens", usage.completion_tokens}};
  j["turn_histogram"] = std::move(hist);
  return j;
}

MetricReport MetricReport::from_json(const nlohmann::ordered_json& j) {
  MetricReport r;
  try {
    r.em = j.at("em").get<double>();
    r.f1 = j.at("f1").get<double>();
    r.n = j.at("n").get<std::size_t>();
    r.sigma_m = j.at("sigma_m").get<double>();
    r.turn_mu = j.value("turn_mu", 0.0);
    r.turn_sigma = j.value("turn_sigma", 0.0);
    if (auto c = j.find("cost_per_trial"); c != j.end() && !c->is_null()) r.cost_per_trial = c->get<double>();
    r.time_per_trial = j.value("time_per_trial", 0.0);
    r.errors = j.value("errors", std::size_t{0});
    if (auto u = j.find("usage"); u != j.end()) {
      r.usage.prompt_tokens = u->value("prompt_tokens", std::int64_t{0});
      r.usage.completion_tokens = u->value("completion_tokens", std::int64_t{0});
    }
    if (auto h = j.find("turn_histogram"); h != j.end())
      for (const auto& [k, v] : h->items()) r.turn_histogram[std::stoi(k)] = v.get<std::size_t>();
  } catch (const std::exception& e) {
    throw LoadError(std::string("metric report: ") + e.what());
  }
  return r;
}

MetricReport aggregate(std::span<const ItemRecord> records, const CostModel* cost) {
  MetricReport report;
  report.n = records.size();
  if (records.empty()) return report;
  long long em_sum = 0;
  double f1_sum = 0.0;
  double time_sum = 0.0;
  double cost_sum = 0.0;
  std::vector<int> rounds;
  for (const auto& r : records) {
    em_sum += r.em;
    f1_sum += r.f1;
    time_sum += r.wall_time_s;
    report.usage += r.usage;
    if (r.error) {
      ++report.errors;
    } else {
      rounds.push_back(r.rounds);
    }
    if (cost) cost_sum += cost_of(r.usage, cost->model, cost->fine_tuned, cost->prices);
  }
  const double n = static_cast<double>(records.size());
  report.em = static_cast<double>(em_sum) * 100.0 / n;
  report.f1 = f1_sum * 100.0 / n;
  report.sigma_m = standard_error(report.em, records.size());
  if (!rounds.empty()) {
    auto stats = turn_stats(rounds);
    report.turn_mu = stats.mu;
    report.turn_sigma = stats.sigma;
    report.turn_histogram = std::move(stats.histogram);
  }
  report.time_per_trial = time_sum / n;
  if (cost) report.cost_per_trial = cost_sum / n;
  return report;
}

EvalResult run_eval(const EpisodeConfig& cfg, const std::vector<QAItem>& items, LanguageModel& lm, Tool& tool,
                    const EvalOptions& options) {
  cfg.validate();
  struct Outcome {
    ItemRecord record;
    std::optional<Trajectory> trajectory;
  };
  EvalResult result;
  if (options.records_path && std::filesystem::exists(*options.records_path))
    std::filesystem::remove(*options.records_path);

  ordered_parallel_for<Outcome>(
      items.size(), options.concurrency,
      [&](std::size_t i) {
        const QAItem& item = items[i];
        try {
          Trajectory t = run_episode(cfg, item, lm, tool, *options.registry, options.clock);
          ItemRecord record = make_item_record(item, t);
          return Outcome{std::move(record), std::move(t)};
        } catch (const std::exception& e) {
          spdlog::warn("episode {} failed: {}", item.question_id, e.what());
          return Outcome{make_error_record(item, cfg.method, e.what()), std::nullopt};
        }
      },
      [&](std::size_t, Outcome outcome) {
        if (options.records_path) jsonl::append(*options.records_path, to_json(outcome.record));
        result.records.push_back(std::move(outcome.record));
        if (outcome.trajectory) result.trajectories.push_back(std::move(*outcome.trajectory));
      });

  result.report = aggregate(result.records, options.cost);
  return result;
}

RobustnessResult robustness_sweep(const EpisodeConfig& cfg, const std::vector<QAItem>& items, LanguageModel& lm,
                                  std::shared_ptr<Tool> tool, std::shared_ptr<ObservationPool> pool,
                                  const PerturbationConfig& perturbation, const EvalOptions& options) {
  if (!tool) throw ConfigError("robustness sweep: no tool");
  if (!pool) pool = std::make_shared<ObservationPool>();
  RobustnessResult out;

  auto normal = run_eval(cfg, items, lm, *tool, for_run(options, "normal"));
  out.normal = normal.report;
  for (const auto& t : normal.trajectories) {
    for (const auto& r : t.rounds) {
      const auto* a = std::get_if<Action>(&r.action);
      if (a && !a->is_finish() && r.observation && *r.observation != kNoneObservation) pool->add(*r.observation);
    }
  }

  PerturbationConfig none_cfg = perturbation;
  none_cfg.mode = PerturbationMode::NoneMode;
  PerturbedTool none_tool(tool, none_cfg);
  out.none = run_eval(cfg, items, lm, none_tool, for_run(options, "none")).report;

  PerturbationConfig random_cfg = perturbation;
  random_cfg.mode = PerturbationMode::RandomMode;
  PerturbedTool random_tool(tool, random_cfg, pool);
  out.random = run_eval(cfg, items, lm, random_tool, for_run(options, "random")).report;
  return out;
}

std::vector<ScalingStep> scaling_sweep(const std::vector<Trajectory>& curated, std::span<const std::size_t> sizes,
                                       std::uint64_t seed, const std::filesystem::path& out_dir, ExportFormat format,
                                       const ExportOptions& export_options, const ScalingEvaluator& evaluate) {
  if (sizes.empty()) throw PreconditionError("scaling sweep needs at least one size");
  std::size_t largest = 0;
  for (auto n : sizes) {
    if (n == 0) throw PreconditionError("scaling sweep sizes must be positive");
    largest = std::max(largest, n);
  }
  if (largest > curated.size())
    throw PreconditionError("scaling sweep: pool of " + std::to_string(curated.size()) + " is short of " +
                            std::to_string(largest) + " by " + std::to_string(largest - curated.size()));

  std::vector<std::pair<std::string, const Trajectory*>> order;
  for (const auto& t : curated) order.emplace_back(content_key(t), &t);
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  Rng rng(seed);
  rng.shuffle(order);

  std::filesystem::create_directories(out_dir);
  std::vector<ScalingStep> steps;
  for (auto n : sizes) {
    std::vector<Trajectory> subset;
    subset.reserve(n);
    for (std::size_t i = 0; i < n; ++i) subset.push_back(*order[i].second);

    CurationPlan plan;
    plan.seed = seed;
    std::map<PoolKey, std::size_t> counts;
    for (const auto& t : subset) ++counts[{t.task, base_method(t.method)}];
    for (const auto& [key, count] : counts) plan.entries.push_back({key.first, key.second, count});

    ScalingStep step;
    step.size = n;
    step.plan_path = out_dir / ("plan_" + std::to_string(n) + ".json");
    step.export_path = out_dir / ("export_" + std::to_string(n) + ".jsonl");
    std::ofstream(step.plan_path) << plan.to_json().dump(2) << '\n';
    export_jsonl(subset, format, step.export_path, export_options);
    if (evaluate) step.report = evaluate(step);
    steps.push_back(std::move(step));
  }
  return steps;
}

ResultMatrix matrix_from_records(const std::vector<std::pair<std::string, std::vector<ItemRecord>>>& runs) {
  if (runs.empty()) throw PreconditionError("method-choice analysis needs at least one run");
  std::vector<std::string> questions;
  std::vector<std::string> methods;
  std::vector<std::map<std::string, int>> lookup;
  for (const auto& [name, records] : runs) {
    methods.push_back(name);
    std::map<std::string, int> by_id;
    for (const auto& r : records) by_id[r.question_id] = r.em;
    if (by_id.size() != records.size()) throw PreconditionError("run '" + name + "' repeats a question id");
    lookup.push_back(std::move(by_id));
  }
  for (const auto& r : runs.front().second) questions.push_back(r.question_id);
  for (std::size_t j = 1; j < runs.size(); ++j) {
    if (lookup[j].size() != questions.size()) throw PreconditionError("run '" + methods[j] + "' covers different questions");
    for (const auto& q : questions)
      if (!lookup[j].count(q)) throw PreconditionError("run '" + methods[j] + "' lacks question " + q);
  }
  ResultMatrix m(questions, methods);
  for (std::size_t i = 0; i < questions.size(); ++i)
    for (std::size_t j = 0; j < methods.size(); ++j) m.set(i, j, lookup[j].at(questions[i]) == 1);
  return m;
}

std::string markdown_metrics_table(std::span<const ReportRow> rows) {
  std::string out = "| Run | EM | F1 | σ_M | n | #Turns μ | #Turns σ |\n|---|---|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    out += "| " + r.label + " | " + fixed(r.report.em, 1) + " | " + fixed(r.report.f1, 1) + " | " +
           fixed(r.report.sigma_m, 2) + " | " + std::to_string(r.report.n) + " | " + fixed(r.report.turn_mu, 2) +
           " | " + fixed(r.report.turn_sigma, 2) + " |\n";
  }
  return out;
}

std::string markdown_cost_table(std::span<const ReportRow> rows) {
  std::string out = "| Run | Money ($) | Time (s) |\n|---|---|---|\n";
  for (const auto& r : rows) {
    std::string money = r.report.cost_per_trial ? fixed(*r.report.cost_per_trial, 4) : "n/a";
    out += "| " + r.label + " | " + money + " | " + fixed(r.report.time_per_trial, 2) + " |\n";
  }
  return out;
}

std::string markdown_robustness_table(std::span<const std::pair<std::string, RobustnessResult>> rows) {
  std::string out = "| Run | Normal | \"None\" | Random |\n|---|---|---|---|\n";
  for (const auto& [label, r] : rows)
    out += "| " + label + " | " + fixed(r.normal.em, 1) + " | " + fixed(r.none.em, 1) + " | " + fixed(r.random.em, 1) +
           " |\n";
  return out;
}

std::string markdown_bounds_table(const MethodChoiceBounds& bounds, const std::vector<std::string>& methods) {
  std::string out = "| Method | EM |\n|---|---|\n";
  for (std::size_t i = 0; i < methods.size() && i < bounds.per_method_em.size(); ++i)
    out += "| " + methods[i] + " | " + fixed(bounds.per_method_em[i], 1) + " |\n";
  out += "| Random method choice | " + fixed(bounds.random_em, 1) + " |\n";
  out += "| Oracle method choice | " + fixed(bounds.oracle_em, 1) + " |\n";
  return out;
}

std::string histogram_csv(const std::map<int, std::size_t>& histogram) {
  std::string out = "rounds,count\n";
  for (const auto& [rounds, count] : histogram) out += std::to_string(rounds) + "," + std::to_string(count) + "\n";
  return out;
}

}  // namespace agentft
