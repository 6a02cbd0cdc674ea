// SPDX-License-Identifier: Apache-2.0
#include "agentft/curation.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "agentft/error.hpp"
#include "agentft/jsonl.hpp"
#include "agentft/rng.hpp"
#include "agentft/strings.hpp"

namespace agentft {
namespace {

std::string entry_name(Task task, Method method) {
  return std::string(to_string(task)) + "/" + std::string(to_string(method));
}

const PromptSet& export_prompt_set(const Trajectory& t, const ExportOptions& options) {
  return options.registry->get(default_prompt_set_id(t.task, Method::ReAct));
}

void require_exportable(const Trajectory& t) {
  if (t.rounds.empty()) throw ExportError("trajectory " + t.question_id + " has no rounds");
  for (std::size_t i = 0; i < t.rounds.size(); ++i) {
    if (t.rounds[i].is_parse_failure())
      throw ExportError("trajectory " + t.question_id + " round " + std::to_string(i + 1) +
                        " holds an invalid action; clean it before export");
  }
}

/// Strips a trailing reflection instruction, reporting whether one was there.
bool strip_reflection(std::string& content) {
  std::string suffix = "\n" + std::string(kReflectionInstruction);
  if (content.size() >= suffix.size() && content.compare(content.size() - suffix.size(), suffix.size(), suffix) == 0) {
    content.resize(content.size() - suffix.size());
    return true;
  }
  return false;
}

std::string_view to_string(ReviewDecision d) {
  switch (d) {
    case ReviewDecision::Accept: return "accept";
    case ReviewDecision::Reject: return "reject";
    case ReviewDecision::EditAnswer: return "edit";
  }
  return "accept";
}

ReviewDecision parse_decision(std::string_view s) {
  if (s == "accept") return ReviewDecision::Accept;
  if (s == "reject") return ReviewDecision::Reject;
  if (s == "edit") return ReviewDecision::EditAnswer;
  throw LoadError("unknown review decision '" + std::string(s) + "'");
}

}  // namespace

std::size_t CurationPlan::total() const {
  std::size_t n = 0;
  for (const auto& e : entries) n += e.count;
  return n;
}

void CurationPlan::validate() const {
  std::set<PoolKey> seen;
  for (const auto& e : entries) {
    if (!seen.insert({e.task, base_method(e.method)}).second)
      throw ConfigError("curation plan: duplicate entry " + entry_name(e.task, e.method));
  }
  if (filters.max_rounds < 1) throw ConfigError("curation plan: filters.max_rounds must be at least 1");
}

CurationPlan CurationPlan::from_json(const nlohmann::json& j) {
  CurationPlan plan;
  try {
    for (const auto& e : j.at("entries")) {
      PlanEntry entry;
      entry.task = parse_task(e.at("task").get<std::string>());
      entry.method = parse_method(e.at("method").get<std::string>());
      auto count = e.at("count").get<long long>();
      if (count < 0) throw ConfigError("curation plan: negative count for " + entry_name(entry.task, entry.method));
      entry.count = static_cast<std::size_t>(count);
      plan.entries.push_back(entry);
    }
    if (auto f = j.find("filters"); f != j.end()) {
      plan.filters.require_reward_1 = f->value("require_reward_1", true);
      plan.filters.max_rounds = f->value("max_rounds", 11);
    }
    plan.seed = j.value("seed", std::uint64_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("curation plan: ") + e.what());
  }
  plan.validate();
  return plan;
}

CurationPlan CurationPlan::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("curation plan not found: " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("curation plan " + path.string() + ": " + e.what());
  }
}

nlohmann::json CurationPlan::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& e : entries)
    list.push_back({{"task", to_string(e.task)}, {"method", to_string(e.method)}, {"count", e.count}});
  return {{"entries", std::move(list)},
          {"filters", {{"require_reward_1", filters.require_reward_1}, {"max_rounds", filters.max_rounds}}},
          {"seed", seed}};
}

std::vector<Trajectory> filter_successful(const std::vector<Trajectory>& trajectories, const CurationFilters& filters) {
  std::vector<Trajectory> out;
  for (const auto& t : trajectories) {
    if (filters.require_reward_1 && t.reward != 1) continue;
    if (t.truncated || t.rounds.empty()) continue;
    if (static_cast<int>(t.rounds.size()) > filters.max_rounds) continue;
    out.push_back(t);
  }
  return out;
}

Trajectory cot_to_react(const Trajectory& cot) {
  if (cot.method != Method::CoT && cot.method != Method::CoTAsReAct)
    throw ConversionError("trajectory " + cot.question_id + " is " + std::string(to_string(cot.method)) + ", not CoT");
  std::optional<std::string> answer = cot.final_answer;
  if (!answer && !cot.rounds.empty()) {
    if (const auto* a = std::get_if<Action>(&cot.rounds.back().action); a && a->is_finish()) answer = a->payload();
  }
  if (!answer) throw ConversionError("CoT trajectory " + cot.question_id + " has no answer");
  if (answer->find('\n') != std::string::npos)
    throw ConversionError("CoT trajectory " + cot.question_id + " has a multi-line answer");

  Trajectory out = cot;
  std::string thought = cot.rounds.empty() ? std::string() : cot.rounds.front().thought;
  out.rounds = {Round::from_action_line(std::move(thought), "finish[" + *answer + "]")};
  out.method = Method::CoTAsReAct;
  out.final_answer = answer;
  out.truncated = false;
  return out;
}

std::vector<Trajectory> deduplicate(const std::vector<Trajectory>& trajectories) {
  std::set<std::string> seen;
  std::vector<Trajectory> out;
  for (const auto& t : trajectories)
    if (seen.insert(content_key(t)).second) out.push_back(t);
  return out;
}

TrajectoryPools make_pools(const std::vector<Trajectory>& trajectories) {
  TrajectoryPools pools;
  for (const auto& t : trajectories) pools[{t.task, base_method(t.method)}].push_back(t);
  return pools;
}

std::vector<Trajectory> mix(const TrajectoryPools& pools, const CurationPlan& plan) {
  plan.validate();
  std::vector<std::string> shortfalls;
  for (const auto& e : plan.entries) {
    if (e.count == 0) continue;
    auto it = pools.find({e.task, base_method(e.method)});
    std::size_t have = it == pools.end() ? 0 : it->second.size();
    if (have < e.count)
      shortfalls.push_back(entry_name(e.task, e.method) + " needs " + std::to_string(e.count) + " but has " +
                           std::to_string(have) + " (short by " + std::to_string(e.count - have) + ")");
  }
  if (!shortfalls.empty()) throw PreconditionError("insufficient pool: " + strings::join(shortfalls, "; "));

  std::vector<Trajectory> out;
  out.reserve(plan.total());
  for (const auto& e : plan.entries) {
    if (e.count == 0) continue;
    std::vector<std::pair<std::string, const Trajectory*>> keyed;
    for (const auto& t : pools.at({e.task, base_method(e.method)})) keyed.emplace_back(content_key(t), &t);
    std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    Rng rng(plan.seed ^ strings::fnv1a(entry_name(e.task, base_method(e.method))));
    rng.shuffle(keyed);
    for (std::size_t i = 0; i < e.count; ++i) out.push_back(*keyed[i].second);
  }
  Rng(plan.seed).shuffle(out);
  return out;
}

std::string summarize_counts(const std::vector<Trajectory>& trajectories, const CurationPlan* plan) {
  std::vector<Method> order;
  auto note = [&](Method m) {
    if (std::find(order.begin(), order.end(), m) == order.end()) order.push_back(m);
  };
  if (plan) {
    for (const auto& e : plan->entries) note(base_method(e.method));
  } else {
    for (auto m : {Method::IO, Method::CoT, Method::ReAct, Method::Reflexion}) note(m);
  }
  std::map<Method, std::size_t> counts;
  for (const auto& t : trajectories) {
    ++counts[base_method(t.method)];
    note(base_method(t.method));
  }
  std::vector<std::string> parts;
  for (auto m : order)
    if (counts[m] > 0) parts.push_back(std::to_string(counts[m]) + " " + std::string(to_string(m)));
  std::string out = std::to_string(trajectories.size()) + (trajectories.size() == 1 ? " trajectory" : " trajectories");
  if (!parts.empty()) out += " (" + strings::join(parts, " / ") + ")";
  return out;
}

std::string_view to_string(ExportFormat format) noexcept {
  return format == ExportFormat::ChatMessages ? "chat" : "prompt_completion";
}

ExportFormat parse_export_format(std::string_view name) {
  if (strings::iequals(name, "chat") || strings::iequals(name, "chat_messages")) return ExportFormat::ChatMessages;
  if (strings::iequals(name, "prompt_completion") || strings::iequals(name, "completion"))
    return ExportFormat::PromptCompletion;
  throw ConfigError("unknown export format '" + std::string(name) + "' (expected chat or prompt_completion)");
}

nlohmann::ordered_json to_chat_record(const Trajectory& t, const ExportOptions& options) {
  require_exportable(t);
  auto system = system_text(export_prompt_set(t, options), true);
  nlohmann::ordered_json messages = nlohmann::ordered_json::array();
  for (auto& m : render_messages(system, t.question, t.rounds))
    messages.push_back({{"role", std::move(m.role)}, {"content", std::move(m.content)}});
  return {{"messages", std::move(messages)}};
}

nlohmann::ordered_json to_prompt_completion_record(const Trajectory& t, const ExportOptions& options) {
  require_exportable(t);
  std::string prompt = render_context(export_prompt_set(t, options), true, t.question, {});
  std::string completion;
  nlohmann::ordered_json spans = nlohmann::ordered_json::array();
  for (const auto& r : t.rounds) {
    std::size_t before = completion.size();
    std::string text = render_round(r);
    completion += text;
    if (r.observation && options.mask_observations) {
      std::size_t end = before + text.size() - 1;  // before the trailing '\n'
      spans.push_back({end - r.observation->size(), end});
    }
  }
  return {{"prompt", std::move(prompt)}, {"completion", std::move(completion)}, {"mask_spans", std::move(spans)}};
}

void export_jsonl(const std::vector<Trajectory>& trajectories, ExportFormat format, const std::filesystem::path& out,
                  const ExportOptions& options) {
  std::vector<Json> records;
  records.reserve(trajectories.size());
  for (const auto& t : trajectories)
    records.push_back(format == ExportFormat::ChatMessages ? to_chat_record(t, options)
                                                           : to_prompt_completion_record(t, options));
  jsonl::write(out, records);
}

std::vector<Round> rounds_from_chat(const nlohmann::ordered_json& record) {
  const auto& messages = record.at("messages");
  std::vector<Round> rounds;
  bool reflect = false;
  bool seen_question = false;
  for (const auto& m : messages) {
    auto role = m.at("role").get<std::string>();
    auto content = m.at("content").get<std::string>();
    if (role == "system") continue;
    if (role == "user") {
      reflect = strip_reflection(content);
      if (!seen_question) {
        seen_question = true;
        continue;
      }
      constexpr std::string_view kPrefix = "Observation: ";
      if (rounds.empty() || content.compare(0, kPrefix.size(), kPrefix) != 0)
        throw ConversionError("chat record: unexpected user turn");
      rounds.back().observation = content.substr(kPrefix.size());
    } else if (role == "assistant") {
      constexpr std::string_view kThought = "Thought: ";
      auto split = content.rfind("\nAction: ");
      if (content.compare(0, kThought.size(), kThought) != 0 || split == std::string::npos)
        throw ConversionError("chat record: assistant turn is not \"Thought: ...\\nAction: ...\"");
      rounds.push_back(Round::from_action_line(content.substr(kThought.size(), split - kThought.size()),
                                               content.substr(split + 9)));
      rounds.back().is_reflection = reflect;
      reflect = false;
    } else {
      throw ConversionError("chat record: unknown role '" + role + "'");
    }
  }
  return rounds;
}

ReviewSession::ReviewSession(std::vector<Trajectory> trajectories, std::filesystem::path sidecar)
    : trajectories_(std::move(trajectories)), sidecar_(std::move(sidecar)) {
  if (std::filesystem::exists(sidecar_))
    for (auto& e : read_review_sidecar(sidecar_)) decisions_[e.key] = std::move(e);
}

std::size_t ReviewSession::next_index() const {
  for (std::size_t i = 0; i < trajectories_.size(); ++i)
    if (!decisions_.count(content_key(trajectories_[i]))) return i;
  return trajectories_.size();
}

std::size_t ReviewSession::run(std::istream& in, std::ostream& out) {
  std::size_t recorded = 0;
  for (std::size_t i = 0; i < trajectories_.size(); ++i) {
    const Trajectory& t = trajectories_[i];
    std::string key = content_key(t);
    if (decisions_.count(key)) continue;

    out << "[" << (i + 1) << "/" << trajectories_.size() << "] " << to_string(t.task) << " " << to_string(t.method)
        << " " << t.question_id << "\n";
    out << "Question: " << t.question << "\n";
    for (const auto& r : t.rounds) out << render_round(r);
    out << "Answer: " << t.final_answer.value_or("(none)") << "  reward=" << t.reward << "\n";
    if (std::any_of(t.rounds.begin(), t.rounds.end(), [](const Round& r) { return strings::trim(r.thought).empty(); }))
      out << "warning: empty thought\n";

    ReviewEntry entry;
    entry.key = key;
    for (;;) {
      out << "[a]ccept [r]eject [e]dit answer [q]uit > " << std::flush;
      std::string line;
      if (!std::getline(in, line)) return recorded;
      auto cmd = strings::to_lower(strings::trim(line));
      if (cmd == "q") return recorded;
      if (cmd == "a") {
        entry.decision = ReviewDecision::Accept;
      } else if (cmd == "r") {
        entry.decision = ReviewDecision::Reject;
      } else if (cmd == "e") {
        out << "New answer: " << std::flush;
        std::string answer;
        if (!std::getline(in, answer)) return recorded;
        entry.decision = ReviewDecision::EditAnswer;
        entry.answer = std::string(strings::trim(answer));
      } else {
        continue;
      }
      break;
    }
    jsonl::append(sidecar_, Json{{"key", entry.key}, {"decision", to_string(entry.decision)}, {"answer", entry.answer}});
    decisions_[key] = std::move(entry);
    ++recorded;
  }
  return recorded;
}

std::vector<Trajectory> ReviewSession::curated() const {
  std::vector<ReviewEntry> entries;
  for (const auto& [key, e] : decisions_) entries.push_back(e);
  return apply_review(trajectories_, entries);
}

std::vector<ReviewEntry> read_review_sidecar(const std::filesystem::path& sidecar) {
  std::vector<ReviewEntry> out;
  jsonl::for_each(sidecar, [&](const Json& j, std::size_t line) {
    try {
      ReviewEntry e;
      e.key = j.at("key").get<std::string>();
      e.decision = parse_decision(j.at("decision").get<std::string>());
      e.answer = j.value("answer", "");
      out.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw LoadError(sidecar.string() + ":" + std::to_string(line) + ": " + ex.what());
    }
  });
  return out;
}

std::vector<Trajectory> apply_review(const std::vector<Trajectory>& trajectories,
                                     const std::vector<ReviewEntry>& decisions) {
  std::map<std::string, const ReviewEntry*> by_key;
  for (const auto& d : decisions) by_key[d.key] = &d;
  std::vector<Trajectory> out;
  for (const auto& t : trajectories) {
    auto it = by_key.find(content_key(t));
    if (it == by_key.end() || it->second->decision == ReviewDecision::Reject) continue;
    Trajectory kept = t;
    if (it->second->decision == ReviewDecision::EditAnswer) {
      kept.final_answer = it->second->answer;
      if (!kept.rounds.empty() && kept.rounds.back().is_finish()) {
        Round& last = kept.rounds.back();
        bool reflect = last.is_reflection;
        last = Round::from_action_line(last.thought, "finish[" + it->second->answer + "]");
        last.is_reflection = reflect;
      }
    }
    out.push_back(std::move(kept));
  }
  return out;
}

}  // namespace agentft
