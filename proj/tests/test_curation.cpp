// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "agentft/agent.hpp"
#include "agentft/curation.hpp"
#include "agentft/jsonl.hpp"
#include "support.hpp"

using namespace agentft;
using agentft::testing::TempDir;
using agentft::testing::count_lines;
using agentft::testing::finish_round;
using agentft::testing::read_file;
using agentft::testing::search_round;
using agentft::testing::synthetic_trajectory;

namespace {

std::vector<Trajectory> pool_of(Task task, Method method, std::size_t n, std::size_t offset = 0) {
  std::vector<Trajectory> out;
  for (std::size_t i = 0; i < n; ++i) {
    auto id = std::string(to_string(task)) + "-" + std::string(to_string(method)) + "-" + std::to_string(offset + i);
    int searches = base_method(method) == Method::CoT ? 0 : static_cast<int>(1 + i % 4);
    out.push_back(synthetic_trajectory(id, task, method, searches));
  }
  return out;
}

CurationPlan plan_of(std::vector<PlanEntry> entries, std::uint64_t seed = 1) {
  CurationPlan p;
  p.entries = std::move(entries);
  p.seed = seed;
  return p;
}

std::map<PoolKey, std::size_t> counts_by_key(const std::vector<Trajectory>& ts) {
  std::map<PoolKey, std::size_t> out;
  for (const auto& t : ts) ++out[{t.task, base_method(t.method)}];
  return out;
}

Trajectory cot_trajectory(const std::string& id, const std::string& thought, const std::string& answer) {
  Trajectory t;
  t.question_id = id;
  t.question = "Question " + id;
  t.method = Method::CoT;
  t.rounds = {finish_round(thought, answer)};
  t.final_answer = answer;
  t.reward = 1;
  return t;
}

}  // namespace

// ---------------------------------------------------------------- filtering

TEST(FilterSuccessful, KeepsOnlyRewardOneWithinLimits) {
  std::vector<Trajectory> input;
  for (int i = 0; i < 600; ++i) input.push_back(synthetic_trajectory("t" + std::to_string(i), Task::HotpotQA,
                                                                     Method::ReAct, 2, i < 500 ? 1 : 0));
  auto out = filter_successful(input);
  EXPECT_EQ(out.size(), 500u);

  Trajectory truncated = synthetic_trajectory("x", Task::HotpotQA, Method::ReAct, 3, 0);
  truncated.truncated = true;
  EXPECT_TRUE(filter_successful({truncated}).empty());

  auto long_one = synthetic_trajectory("long", Task::HotpotQA, Method::ReAct, 11, 1);
  EXPECT_TRUE(filter_successful({long_one}).empty());
  EXPECT_EQ(filter_successful({long_one}, {true, 12}).size(), 1u);
  EXPECT_EQ(filter_successful({synthetic_trajectory("z", Task::HotpotQA, Method::ReAct, 1, 0)}, {false, 11}).size(),
            1u);
}

TEST(FilterSuccessful, SubsetAndIdempotent) {
  std::mt19937_64 gen(2);
  std::vector<Trajectory> input;
  for (int i = 0; i < 200; ++i) {
    auto t = synthetic_trajectory("p" + std::to_string(i), Task::HotpotQA, Method::ReAct, static_cast<int>(gen() % 12),
                                  static_cast<int>(gen() % 2));
    t.truncated = gen() % 5 == 0;
    input.push_back(t);
  }
  auto once = filter_successful(input);
  EXPECT_EQ(filter_successful(once), once);
  for (const auto& t : once) EXPECT_NE(std::find(input.begin(), input.end(), t), input.end());
}

// ---------------------------------------------------------------- CoT conversion

TEST(CotToReact, MilhouseExemplar) {
  const auto& ex = PromptRegistry::bundled().get("hotpotqa-cot").exemplars.at(1);
  auto out = cot_to_react(cot_trajectory("m", ex.thought, ex.answer));
  ASSERT_EQ(out.rounds.size(), 1u);
  EXPECT_EQ(out.method, Method::CoTAsReAct);
  EXPECT_EQ(std::get<Action>(out.rounds[0].action), Action::finish("Richard Nixon"));
  EXPECT_EQ(out.rounds[0].thought, ex.thought);
  EXPECT_EQ(out.reward, 1);
  EXPECT_EQ(parse_rounds("Question: q\n" + render_round(out.rounds[0])), out.rounds);
}

TEST(CotToReact, EdgeCases) {
  auto empty_thought = cot_to_react(cot_trajectory("e", "", "x"));
  EXPECT_EQ(empty_thought.rounds[0].thought, "");
  auto no_answer = cot_trajectory("n", "t", "x");
  no_answer.final_answer.reset();
  no_answer.rounds = {Round::from_action_line("t", "")};
  EXPECT_THROW(cot_to_react(no_answer), ConversionError);
  EXPECT_THROW(cot_to_react(synthetic_trajectory("r", Task::HotpotQA, Method::ReAct, 1)), ConversionError);
}

// ---------------------------------------------------------------- mixing

TEST(Mix, SingleTaskPlanYields734) {
  TrajectoryPools pools;
  pools[{Task::HotpotQA, Method::ReAct}] = pool_of(Task::HotpotQA, Method::ReAct, 620);
  pools[{Task::HotpotQA, Method::CoT}] = pool_of(Task::HotpotQA, Method::CoTAsReAct, 240);
  pools[{Task::HotpotQA, Method::Reflexion}] = pool_of(Task::HotpotQA, Method::Reflexion, 60);
  auto plan = plan_of({{Task::HotpotQA, Method::ReAct, 500},
                       {Task::HotpotQA, Method::CoT, 187},
                       {Task::HotpotQA, Method::Reflexion, 47}});
  auto out = mix(pools, plan);
  EXPECT_EQ(out.size(), 734u);
  auto counts = counts_by_key(out);
  EXPECT_EQ((counts[{Task::HotpotQA, Method::ReAct}]), 500u);
  EXPECT_EQ((counts[{Task::HotpotQA, Method::CoT}]), 187u);
  EXPECT_EQ((counts[{Task::HotpotQA, Method::Reflexion}]), 47u);
  EXPECT_EQ(summarize_counts(out, &plan), "734 trajectories (500 ReAct / 187 CoT / 47 Reflexion)");
  EXPECT_EQ(deduplicate(out).size(), out.size());
}

TEST(Mix, MultiTaskPlanYields2470) {
  const std::vector<PlanEntry> entries = {
      {Task::HotpotQA, Method::ReAct, 500},   {Task::HotpotQA, Method::CoT, 277},
      {Task::StrategyQA, Method::ReAct, 388}, {Task::StrategyQA, Method::CoT, 380},
      {Task::MMLU, Method::ReAct, 456},       {Task::MMLU, Method::CoT, 469},
  };
  TrajectoryPools pools;
  std::size_t expected = 0;
  for (const auto& e : entries) {
    pools[{e.task, e.method}] = pool_of(e.task, e.method, e.count + 25);
    expected += e.count;
  }
  auto out = mix(pools, plan_of(entries));
  EXPECT_EQ(expected, 2470u);
  EXPECT_EQ(out.size(), 2470u);
  auto counts = counts_by_key(out);
  for (const auto& e : entries) EXPECT_EQ((counts[{e.task, e.method}]), e.count);
}

TEST(Mix, ZeroCountAndDeterminism) {
  TrajectoryPools pools;
  pools[{Task::HotpotQA, Method::ReAct}] = pool_of(Task::HotpotQA, Method::ReAct, 50);
  auto plan = plan_of({{Task::HotpotQA, Method::ReAct, 20}, {Task::HotpotQA, Method::CoT, 0}}, 9);
  auto a = mix(pools, plan);
  EXPECT_EQ(a.size(), 20u);
  EXPECT_EQ(mix(pools, plan), a);

  // Pool input order does not matter.
  auto shuffled = pools;
  auto& v = shuffled[{Task::HotpotQA, Method::ReAct}];
  std::reverse(v.begin(), v.end());
  EXPECT_EQ(mix(shuffled, plan), a);

  plan.seed = 10;
  EXPECT_NE(mix(pools, plan), a);
}

TEST(Mix, ShortfallsReportedTogether) {
  TrajectoryPools pools;
  pools[{Task::HotpotQA, Method::ReAct}] = pool_of(Task::HotpotQA, Method::ReAct, 10);
  auto plan = plan_of({{Task::HotpotQA, Method::ReAct, 12}, {Task::MMLU, Method::CoT, 3}});
  try {
    mix(pools, plan);
    FAIL();
  } catch (const PreconditionError& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("HotpotQA"), std::string::npos) << msg;
    EXPECT_NE(msg.find("MMLU"), std::string::npos) << msg;
    EXPECT_NE(msg.find("2"), std::string::npos) << msg;
  }
}

TEST(CurationPlan, JsonRoundTripAndValidation) {
  auto j = nlohmann::json::parse(R"({"entries":[{"task":"hotpotqa","method":"react","count":500},
                                               {"task":"hotpotqa","method":"cot","count":187}],
                                    "filters":{"require_reward_1":true,"max_rounds":11},"seed":3})");
  auto plan = CurationPlan::from_json(j);
  EXPECT_EQ(plan.total(), 687u);
  EXPECT_EQ(CurationPlan::from_json(plan.to_json()).to_json(), plan.to_json());
  auto dup = plan;
  dup.entries.push_back({Task::HotpotQA, Method::ReAct, 1});
  EXPECT_THROW(dup.validate(), ConfigError);
  EXPECT_THROW(CurationPlan::from_json(nlohmann::json::parse(R"({"entries":[{"task":"hotpotqa","method":"react",
                                                                            "count":-1}]})")),
               ConfigError);
}

TEST(Deduplicate, DropsExactCopiesOnly) {
  auto a = synthetic_trajectory("a", Task::HotpotQA, Method::ReAct, 2);
  auto b = a;
  b.question_id = "a-copy";
  auto c = a;
  c.rounds[0].thought += " differently";
  auto out = deduplicate({a, b, c});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].question_id, "a");
}

// ---------------------------------------------------------------- export

TEST(Export, ChatMessageCounts) {
  auto three = synthetic_trajectory("t", Task::HotpotQA, Method::ReAct, 2);
  auto record = to_chat_record(three);
  ASSERT_EQ(record["messages"].size(), 7u);
  EXPECT_EQ(record["messages"][0]["role"], "system");
  EXPECT_EQ(record["messages"][1]["content"], "Question: Question t?");
  EXPECT_EQ(record["messages"][3]["content"], "Observation: observation 0 of t");
  EXPECT_EQ(record["messages"][6]["content"], "Thought: Done with t\nAction: finish[answer t]");

  auto cot = cot_to_react(cot_trajectory("c", "reason", "ans"));
  EXPECT_EQ(to_chat_record(cot)["messages"].size(), 3u);
}

TEST(Export, SystemMessageIsZeroShotInstruction) {
  auto record = to_chat_record(synthetic_trajectory("t", Task::MMLU, Method::ReAct, 1));
  auto system = record["messages"][0]["content"].get<std::string>();
  EXPECT_EQ(system, system_text(PromptRegistry::bundled().get("mmlu-react"), true));
  EXPECT_EQ(system.find("Here are some examples"), std::string::npos);
}

TEST(Export, ChatRecordsReconstructRoundsVerbatim) {
  std::mt19937_64 gen(4);
  for (int i = 0; i < 200; ++i) {
    auto t = synthetic_trajectory("r" + std::to_string(i), Task::HotpotQA, Method::ReAct, static_cast<int>(gen() % 8));
    // Thoughts and observations with awkward content.
    if (!t.rounds.empty()) t.rounds[0].thought = "multi\nline thought with Action: inside";
    if (t.rounds.size() > 1) t.rounds[0].observation = "line one\nObservation: nested";
    auto record = to_chat_record(t);
    EXPECT_EQ(record["messages"].size(), 2 * t.rounds.size() + 1);
    EXPECT_EQ(rounds_from_chat(record), t.rounds);
  }
}

TEST(Export, MaskSpansCoverObservationsExactly) {
  auto t = synthetic_trajectory("m", Task::HotpotQA, Method::ReAct, 3);
  t.rounds[1].observation = "obs with\nnewline";
  auto record = to_prompt_completion_record(t);
  auto completion = record["completion"].get<std::string>();
  auto spans = record["mask_spans"];
  ASSERT_EQ(spans.size(), 3u);
  std::size_t prev_end = 0;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    auto s = spans[i][0].get<std::size_t>();
    auto e = spans[i][1].get<std::size_t>();
    ASSERT_LE(prev_end, s);
    ASSERT_LE(e, completion.size());
    EXPECT_EQ(completion.substr(s, e - s), *t.rounds[i].observation);
    prev_end = e;
  }
  std::string rendered;
  for (const auto& r : t.rounds) rendered += render_round(r);
  EXPECT_EQ(completion, rendered);
  EXPECT_EQ(record["prompt"], render_context(PromptRegistry::bundled().get("hotpotqa-react"), true, t.question, {}));
  EXPECT_EQ(completion.find("Episode finished"), std::string::npos);

  ExportOptions unmasked;
  unmasked.mask_observations = false;
  EXPECT_TRUE(to_prompt_completion_record(t, unmasked)["mask_spans"].empty());
}

TEST(Export, ParseFailureRoundsAreRejected) {
  auto t = synthetic_trajectory("bad", Task::HotpotQA, Method::ReAct, 1);
  t.rounds.insert(t.rounds.begin(), Round::from_action_line("oops", "dance[x]"));
  t.rounds[0].observation = std::string(kInvalidActionObservation);
  EXPECT_THROW(to_chat_record(t), ExportError);
  EXPECT_THROW(to_prompt_completion_record(t), ExportError);
}

TEST(Export, WritesJsonlFiles) {
  TempDir dir;
  std::vector<Trajectory> ts;
  for (int i = 0; i < 5; ++i) ts.push_back(synthetic_trajectory("w" + std::to_string(i), Task::HotpotQA, Method::ReAct, 1));
  export_jsonl(ts, ExportFormat::ChatMessages, dir / "chat.jsonl");
  export_jsonl(ts, ExportFormat::PromptCompletion, dir / "pc.jsonl");
  EXPECT_EQ(count_lines(dir / "chat.jsonl"), 5u);
  EXPECT_EQ(count_lines(dir / "pc.jsonl"), 5u);
  auto first = nlohmann::ordered_json::parse(read_file(dir / "pc.jsonl").substr(0, read_file(dir / "pc.jsonl").find('\n')));
  EXPECT_EQ(std::vector<std::string>({"prompt", "completion", "mask_spans"}),
            (std::vector<std::string>{first.begin().key(), std::next(first.begin()).key(),
                                      std::next(first.begin(), 2).key()}));
  EXPECT_EQ(parse_export_format("prompt_completion"), ExportFormat::PromptCompletion);
  EXPECT_THROW(parse_export_format("alpaca"), ConfigError);
}

// ---------------------------------------------------------------- review

TEST(Review, RejectAllGivesEmptySet) {
  TempDir dir;
  std::vector<Trajectory> ts;
  for (int i = 0; i < 4; ++i) ts.push_back(synthetic_trajectory("v" + std::to_string(i), Task::HotpotQA, Method::ReAct, 1));
  ReviewSession session(ts, dir / "review.jsonl");
  std::istringstream in("r\nr\nr\nr\n");
  std::ostringstream out;
  EXPECT_EQ(session.run(in, out), 4u);
  EXPECT_TRUE(session.complete());
  EXPECT_TRUE(session.curated().empty());
}

TEST(Review, ResumesAfterTenDecisions) {
  TempDir dir;
  std::vector<Trajectory> ts;
  for (int i = 0; i < 15; ++i) ts.push_back(synthetic_trajectory("v" + std::to_string(i), Task::HotpotQA, Method::ReAct, 1));
  {
    ReviewSession session(ts, dir / "review.jsonl");
    std::string cmds;
    for (int i = 0; i < 10; ++i) cmds += "a\n";
    cmds += "q\n";
    std::istringstream in(cmds);
    std::ostringstream out;
    EXPECT_EQ(session.run(in, out), 10u);
  }
  ReviewSession resumed(ts, dir / "review.jsonl");
  EXPECT_EQ(resumed.next_index(), 10u);
  std::istringstream in("a\n");
  std::ostringstream out;
  resumed.run(in, out);
  EXPECT_EQ(out.str().rfind("[11/15]", 0), 0u);
}

TEST(Review, EditAnswerRewritesFinishAndReplayIsDeterministic) {
  TempDir dir;
  std::vector<Trajectory> ts = {synthetic_trajectory("e0", Task::HotpotQA, Method::ReAct, 1),
                                synthetic_trajectory("e1", Task::HotpotQA, Method::ReAct, 2),
                                synthetic_trajectory("e2", Task::HotpotQA, Method::ReAct, 0)};
  ReviewSession session(ts, dir / "review.jsonl");
  std::istringstream in("a\nbogus\ne\nfixed answer\nr\n");
  std::ostringstream out;
  session.run(in, out);
  auto curated = session.curated();
  ASSERT_EQ(curated.size(), 2u);
  EXPECT_EQ(curated[1].final_answer, "fixed answer");
  EXPECT_EQ(curated[1].rounds.back().action_raw, "finish[fixed answer]");
  EXPECT_EQ(apply_review(ts, read_review_sidecar(dir / "review.jsonl")), curated);
}
