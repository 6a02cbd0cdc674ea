// SPDX-License-Identifier: Apache-2.0
// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "agentft/agent.hpp"
#include "agentft/context.hpp"
#include "agentft/curation.hpp"
#include "agentft/evaluation.hpp"
#include "agentft/metrics.hpp"
#include "agentft/toolbox.hpp"
#include "support.hpp"

using namespace agentft;
using namespace agentft::testing;

namespace {

// Pinned tolerances and budgets.
constexpr double kSeDecimals = 2;
constexpr double kSeBudgetS = 1.0;
constexpr double kBoundsBudgetS = 5.0;
constexpr double kReplayBudgetS = 5.0;
constexpr double kRobustnessBudgetS = 2.0;
constexpr double kFloatEps = 1e-9;
constexpr double kReplaceLo = 0.48;
constexpr double kReplaceHi = 0.52;
constexpr double kContextRatioMax = 0.25;

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back(what);
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v, int decimals = 3) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(decimals) << v;
  return os.str();
}

// ------------------------------------------------------------------ criteria

Outcome standard_errors() {
  Outcome o;
  auto start = std::chrono::steady_clock::now();
  const std::vector<std::pair<double, double>> table = {{37.2, 2.16}, {45.0, 2.22}, {42.0, 2.21},
                                                        {22.4, 1.86}, {28.0, 2.01}, {31.4, 2.08}};
  for (auto [em, se] : table) {
    double got = round_to(standard_error(em, 500), static_cast<int>(kSeDecimals));
    o.check(std::abs(got - se) < kFloatEps, "EM " + fmt(em, 1) + " -> " + fmt(got, 2) + ", want " + fmt(se, 2));
  }
  double t = seconds_since(start);
  o.check(t < kSeBudgetS, "took " + fmt(t) + " s");
  return o;
}

Outcome method_choice() {
  Outcome o;
  auto start = std::chrono::steady_clock::now();

  // 500 questions; per-method success counts give 22.4 / 28.0 / 39.4 / 39.8.
  const std::vector<std::size_t> successes = {112, 140, 197, 199};
  std::vector<std::string> qids;
  for (int i = 0; i < 500; ++i) qids.push_back("q" + std::to_string(i));
  ResultMatrix m(qids, {"IO", "CoT", "ReAct", "Tuned"});
  for (std::size_t j = 0; j < successes.size(); ++j)
    for (std::size_t i = 0; i < successes[j]; ++i) m.set((i * 7 + j * 131) % 500, j, true);
  auto b = method_choice_bounds(m);
  o.check(b.random_em == 32.4, "random_em " + fmt(b.random_em, 12));

  std::mt19937_64 gen(2024);
  std::bernoulli_distribution coin(0.4);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::string> ids;
    for (int i = 0; i < 20; ++i) ids.push_back(std::to_string(i));
    ResultMatrix r(ids, {"a", "b", "c", "d"});
    std::vector<std::array<bool, 4>> cells(20);
    for (std::size_t i = 0; i < 20; ++i)
      for (std::size_t j = 0; j < 4; ++j) r.set(i, j, cells[i][j] = coin(gen));
    auto rb = method_choice_bounds(r);

    double mean = 0.0, best = 0.0, oracle_rows = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
      double col = 0.0;
      for (std::size_t i = 0; i < 20; ++i) col += cells[i][j];
      col = 100.0 * col / 20.0;
      mean += col / 4.0;
      best = std::max(best, col);
    }
    for (const auto& row : cells) oracle_rows += std::any_of(row.begin(), row.end(), [](bool c) { return c; });
    double oracle = 100.0 * oracle_rows / 20.0;

    if (std::abs(rb.random_em - mean) > kFloatEps || std::abs(rb.oracle_em - oracle) > kFloatEps ||
        !(rb.random_em <= rb.best_single_em + kFloatEps && rb.best_single_em <= rb.oracle_em + kFloatEps) ||
        std::abs(rb.best_single_em - best) > kFloatEps) {
      o.check(false, "matrix " + std::to_string(trial) + " violates bounds");
      break;
    }
  }
  double t = seconds_since(start);
  o.check(t < kBoundsBudgetS, "took " + fmt(t) + " s");
  return o;
}

Outcome episode_replay() {
  Outcome o;
  auto start = std::chrono::steady_clock::now();
  const auto& registry = PromptRegistry::bundled();
  const std::vector<std::pair<std::string, std::vector<std::size_t>>> expected = {
      {"hotpotqa-react", {3, 2, 4, 3}}, {"mmlu-react", {1, 3, 7}}, {"strategyqa-react", {3, 2, 3, 3}}};

  for (const auto& [set_id, counts] : expected) {
    const auto& set = registry.get(set_id);
    o.check(set.exemplars.size() == counts.size(), set_id + " has " + std::to_string(set.exemplars.size()) +
                                                       " exemplars");
    for (std::size_t i = 0; i < set.exemplars.size() && i < counts.size(); ++i) {
      auto replay = replay_of(set.exemplars[i]);
      ScriptedLanguageModel lm(replay.responses, {});
      FixtureTool tool(replay.observations);
      auto cfg = EpisodeConfig::for_method(Method::ReAct, replay.item.task);
      auto t = run_episode(cfg, replay.item, lm, tool, registry, zero_clock());
      std::string tag = set_id + "[" + std::to_string(i) + "]";
      o.check(t.reward == 1, tag + " reward " + std::to_string(t.reward));
      o.check(t.rounds.size() == counts[i], tag + " rounds " + std::to_string(t.rounds.size()));
      o.check(!t.truncated, tag + " truncated");
    }
  }

  QAItem item;
  item.question_id = "loop";
  item.question = "Which question never ends?";
  item.gold_answers = {"this one"};
  ReplayLanguageModel never(TokenUsage{});
  never.set_fallback("Thought: Keep looking.\nAction: search[more]");
  FixtureTool tool(std::map<std::string, std::string>{{"more", "still nothing"}});
  auto t = run_episode(EpisodeConfig::for_method(Method::ReAct), item, never, tool, registry, zero_clock());
  o.check(t.rounds.size() == 11, "never-finishing run has " + std::to_string(t.rounds.size()) + " rounds");
  o.check(t.truncated, "never-finishing run not truncated");
  o.check(t.reward == 0, "never-finishing run rewarded");

  double s = seconds_since(start);
  o.check(s < kReplayBudgetS, "took " + fmt(s) + " s");
  return o;
}

Outcome cot_conversion() {
  Outcome o;
  for (const char* id : {"hotpotqa-cot", "strategyqa-cot", "mmlu-cot"}) {
    const auto& set = PromptRegistry::bundled().get(id);
    o.check(!set.exemplars.empty(), std::string(id) + " has no exemplars");
    for (std::size_t i = 0; i < set.exemplars.size(); ++i) {
      const auto& ex = set.exemplars[i];
      std::string tag = std::string(id) + "[" + std::to_string(i) + "]";
      Trajectory cot;
      cot.question_id = tag;
      cot.question = ex.item.question;
      cot.task = ex.item.task;
      cot.method = Method::CoT;
      cot.rounds = {Round::from_action_line(ex.thought, "finish[" + ex.answer + "]")};
      cot.final_answer = ex.answer;
      cot.reward = 1;
      auto react = cot_to_react(cot);
      o.check(react.rounds.size() == 1, tag + " has " + std::to_string(react.rounds.size()) + " rounds");
      if (react.rounds.size() != 1) continue;
      const auto* a = std::get_if<Action>(&react.rounds[0].action);
      o.check(a && a->is_finish() && a->payload() == ex.answer, tag + " finish payload differs");
      o.check(react.method == Method::CoTAsReAct, tag + " not tagged CoTAsReAct");
      auto reparsed = parse_rounds("Question: " + react.question + "\n" + render_round(react.rounds[0]));
      o.check(reparsed == react.rounds, tag + " does not re-parse losslessly");
    }
  }
  return o;
}

std::vector<Trajectory> pool_of(Task task, Method method, std::size_t n) {
  std::vector<Trajectory> out;
  for (std::size_t i = 0; i < n; ++i) {
    auto id = std::string(to_string(task)) + "-" + std::string(to_string(method)) + "-" + std::to_string(i);
    int searches = base_method(method) == Method::CoT ? 0 : static_cast<int>(1 + i % 4);
    out.push_back(synthetic_trajectory(id, task, method, searches));
  }
  return out;
}

std::set<std::string> lines_of(const std::filesystem::path& p) {
  std::set<std::string> out;
  std::istringstream in(read_file(p));
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) out.insert(line);
  return out;
}

Outcome curation_counts() {
  Outcome o;
  auto count_of = [](const std::vector<Trajectory>& ts, Task task, Method method) {
    return static_cast<std::size_t>(std::count_if(ts.begin(), ts.end(), [&](const Trajectory& t) {
      return t.task == task && base_method(t.method) == method;
    }));
  };

  TrajectoryPools single;
  single[{Task::HotpotQA, Method::ReAct}] = pool_of(Task::HotpotQA, Method::ReAct, 620);
  single[{Task::HotpotQA, Method::CoT}] = pool_of(Task::HotpotQA, Method::CoTAsReAct, 240);
  single[{Task::HotpotQA, Method::Reflexion}] = pool_of(Task::HotpotQA, Method::Reflexion, 60);
  CurationPlan plan;
  plan.entries = {{Task::HotpotQA, Method::ReAct, 500},
                  {Task::HotpotQA, Method::CoT, 187},
                  {Task::HotpotQA, Method::Reflexion, 47}};
  plan.seed = 7;
  auto curated = mix(single, plan);
  o.check(curated.size() == 734, "single-task plan gave " + std::to_string(curated.size()));
  for (const auto& e : plan.entries)
    o.check(count_of(curated, e.task, e.method) == e.count,
            std::string(to_string(e.method)) + " count " + std::to_string(count_of(curated, e.task, e.method)));

  CurationPlan multi;
  multi.entries = {{Task::HotpotQA, Method::ReAct, 500},   {Task::HotpotQA, Method::CoT, 277},
                   {Task::StrategyQA, Method::ReAct, 388}, {Task::StrategyQA, Method::CoT, 380},
                   {Task::MMLU, Method::ReAct, 456},       {Task::MMLU, Method::CoT, 469}};
  multi.seed = 3;
  TrajectoryPools pools;
  for (const auto& e : multi.entries)
    pools[{e.task, e.method}] =
        pool_of(e.task, e.method == Method::CoT ? Method::CoTAsReAct : e.method, e.count + 40);
  auto mixed = mix(pools, multi);
  o.check(mixed.size() == 2470, "multi-task plan gave " + std::to_string(mixed.size()));
  for (const auto& e : multi.entries)
    o.check(count_of(mixed, e.task, e.method) == e.count,
            std::string(to_string(e.task)) + "/" + std::string(to_string(e.method)) + " count " +
                std::to_string(count_of(mixed, e.task, e.method)));

  TempDir dir;
  std::vector<Trajectory> big = pool_of(Task::HotpotQA, Method::ReAct, 1100);
  const std::vector<std::size_t> sizes = {100, 200, 500, 1000};
  auto steps = scaling_sweep(big, sizes, 5, dir.path());
  o.check(steps.size() == sizes.size(), "scaling produced " + std::to_string(steps.size()) + " steps");
  std::set<std::string> previous;
  for (std::size_t i = 0; i < steps.size() && i < sizes.size(); ++i) {
    auto lines = lines_of(steps[i].export_path);
    o.check(count_lines(steps[i].export_path) == sizes[i] && lines.size() == sizes[i],
            "export " + std::to_string(sizes[i]) + " has " + std::to_string(lines.size()) + " records");
    o.check(std::includes(lines.begin(), lines.end(), previous.begin(), previous.end()),
            "export " + std::to_string(sizes[i]) + " does not contain the smaller one");
    previous = std::move(lines);
  }
  return o;
}

Outcome robustness() {
  Outcome o;
  auto start = std::chrono::steady_clock::now();
  auto inner = std::make_shared<FixtureTool>(std::map<std::string, std::string>{{"q", "real"}});
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    PerturbedTool tool(inner, {PerturbationMode::NoneMode, 0.5, seed});
    std::size_t replaced = 0;
    for (int i = 0; i < 10000; ++i) replaced += tool.search("q") == kNoneObservation;
    double frac = replaced / 10000.0;
    o.check(frac >= kReplaceLo && frac <= kReplaceHi, "seed " + std::to_string(seed) + " fraction " + fmt(frac, 4));
    o.check(tool.replaced() == replaced, "replaced() disagrees with observed replacements");

    PerturbedTool again(inner, {PerturbationMode::NoneMode, 0.5, seed});
    for (int i = 0; i < 10000; ++i) again.search("q");
    o.check(again.decisions() == tool.decisions(), "seed " + std::to_string(seed) + " is not reproducible");
  }
  PerturbedTool off(inner, {PerturbationMode::NoneMode, 0.0, 9});
  bool passthrough = true;
  for (int i = 0; i < 10000; ++i) passthrough = passthrough && off.search("q") == "real";
  o.check(passthrough && off.replaced() == 0, "probability 0 altered an observation");
  double t = seconds_since(start);
  o.check(t < kRobustnessBudgetS, "took " + fmt(t) + " s");
  return o;
}

Outcome export_integrity() {
  Outcome o;
  std::mt19937_64 gen(99);
  std::vector<Trajectory> ts;
  for (int i = 0; i < 200; ++i) {
    auto t = synthetic_trajectory("x" + std::to_string(i), Task::HotpotQA, Method::ReAct, static_cast<int>(gen() % 8));
    for (auto& r : t.rounds)
      if (r.observation && gen() % 3 == 0) *r.observation += "\nsecond line " + std::to_string(gen() % 100);
    ts.push_back(std::move(t));
  }
  for (const auto& ex : PromptRegistry::bundled().get("hotpotqa-react").exemplars) {
    Trajectory t;
    t.question_id = ex.item.question_id;
    t.question = ex.item.question;
    t.rounds = ex.rounds;
    t.reward = 1;
    ts.push_back(std::move(t));
  }

  for (const auto& t : ts) {
    auto chat = to_chat_record(t);
    const std::size_t k = t.rounds.size();
    if (chat["messages"].size() != 2 * k + 1) {
      o.check(false, t.question_id + ": " + std::to_string(chat["messages"].size()) + " messages for " +
                         std::to_string(k) + " rounds");
      break;
    }
    if (chat["messages"][1]["content"] != "Question: " + t.question || rounds_from_chat(chat) != t.rounds) {
      o.check(false, t.question_id + ": chat record does not reconstruct the trajectory");
      break;
    }

    auto pc = to_prompt_completion_record(t);
    auto completion = pc["completion"].get<std::string>();
    std::vector<std::string> observations;
    for (const auto& r : t.rounds)
      if (r.observation) observations.push_back(*r.observation);
    std::vector<std::string> masked;
    for (const auto& span : pc["mask_spans"]) {
      auto s = span[0].get<std::size_t>();
      auto e = span[1].get<std::size_t>();
      masked.push_back(s <= e && e <= completion.size() ? completion.substr(s, e - s) : std::string("<out of range>"));
    }
    if (masked != observations) {
      o.check(false, t.question_id + ": mask spans do not match observations");
      break;
    }
  }
  return o;
}

Outcome efficiency_direction() {
  Outcome o;
  const auto& set = PromptRegistry::bundled().get("hotpotqa-react");
  const std::string q = "Which magazine was started first, Arthur's Magazine or First for Women?";
  auto zero = render_context(set, true, q, {});
  auto few = render_context(set, false, q, {});
  double ratio = static_cast<double>(zero.size()) / static_cast<double>(few.size());
  o.check(ratio < kContextRatioMax, "zero-shot/few-shot ratio " + fmt(ratio));
  o.notes.push_back("ratio " + fmt(ratio));
  return o;
}

Outcome metric_suite() {
  Outcome o;
  const std::vector<std::string> vocab = {"the", "a", "paris", "france", "1,800", "ft", "an", "Nixon", "richard",
                                          "yes", "no", "7,000", "of", "light-years", "93", "billion"};
  std::mt19937_64 gen(17);
  auto phrase = [&] {
    std::string s;
    for (std::size_t n = gen() % 5; n-- > 0;) s += (s.empty() ? "" : " ") + vocab[gen() % vocab.size()];
    return s;
  };
  for (int i = 0; i < 10000; ++i) {
    std::string pred = phrase();
    std::vector<std::string> gold = {phrase()};
    if (exact_match(pred, gold) > f1_score(pred, gold) + kFloatEps) {
      o.check(false, "em > f1 for '" + pred + "' vs '" + gold[0] + "'");
      break;
    }
  }

  std::vector<int> rounds = {1, 3, 4};
  auto ts = turn_stats(rounds);
  o.check(std::abs(ts.mu - 8.0 / 3.0) < kFloatEps, "turn mu " + fmt(ts.mu, 6));
  o.check(std::abs(ts.sigma - std::sqrt(14.0 / 9.0)) < kFloatEps, "turn sigma " + fmt(ts.sigma, 6));
  std::vector<int> flat = {2, 2, 2, 2};
  auto fs = turn_stats(flat);
  o.check(fs.mu == 2.0 && fs.sigma == 0.0 && fs.histogram == std::map<int, std::size_t>{{2, 4}}, "flat turn stats");

  std::vector<QAItem> items;
  ReplayLanguageModel lm({40, 4});
  std::map<std::string, std::string> observations;
  for (int i = 0; i < 20; ++i) {
    QAItem item;
    item.question_id = "syn-" + std::to_string(i);
    item.question = "What is synthetic item " + std::to_string(i) + "?";
    item.gold_answers = {"value " + std::to_string(i)};
    lm.add_script(item.question, {"Thought: Look it up.\nAction: search[" + item.question + "]",
                                  "Thought: Found.\nAction: finish[value " + std::to_string(i) + "]"});
    observations[item.question] = "value " + std::to_string(i);
    items.push_back(item);
  }
  FixtureTool tool(observations);
  TempDir dir;
  EvalOptions options;
  options.concurrency = 4;
  options.clock = zero_clock();
  options.records_path = dir / "records.jsonl";
  auto result = run_eval(EpisodeConfig::for_method(Method::ReAct), items, lm, tool, options);
  o.check(result.report.em == 100.0, "pipeline EM " + fmt(result.report.em, 1));
  o.check(result.report.sigma_m == 0.0, "pipeline sigma " + fmt(result.report.sigma_m, 3));
  o.check(result.report.n == 20, "pipeline n " + std::to_string(result.report.n));
  auto reread = aggregate(read_item_records(dir / "records.jsonl"));
  o.check(reread.to_json() == result.report.to_json(), "report not reproducible from records");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"standard-error reproduction", standard_errors},
      {"method-choice bounds", method_choice},
      {"episode replay", episode_replay},
      {"cot conversion", cot_conversion},
      {"curation counts", curation_counts},
      {"robustness wrapper", robustness},
      {"export integrity", export_integrity},
      {"efficiency direction", efficiency_direction},
      {"metric suite", metric_suite},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.notes.push_back(std::string("threw: ") + e.what());
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << name;
    for (const auto& n : o.notes) std::cout << " | " << n;
    std::cout << '\n';
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
