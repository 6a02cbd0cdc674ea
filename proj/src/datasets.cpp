// SPDX-License-Identifier: Apache-2.0
#include "agentft/datasets.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "agentft/error.hpp"
#include "agentft/rng.hpp"
#include "agentft/strings.hpp"
#include "csv.hpp"

namespace agentft {
namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(path.string() + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json read_json_array(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw LoadError(path.string() + ": invalid JSON: " + e.what());
  }
  if (!j.is_array()) throw LoadError(path.string() + ": expected a JSON array of records");
  return j;
}

std::string string_field(const nlohmann::json& record, const char* key, const std::string& where) {
  auto it = record.find(key);
  if (it == record.end()) throw LoadError(where + ": missing field '" + key + "'");
  if (!it->is_string()) throw LoadError(where + ": field '" + key + "' is not a string");
  auto value = it->get<std::string>();
  if (strings::trim(value).empty()) throw LoadError(where + ": field '" + key + "' is empty");
  return value;
}

std::vector<QAItem> load_hotpot(const std::filesystem::path& path, Task task) {
  auto records = read_json_array(path);
  std::vector<QAItem> items;
  for (std::size_t i = 0; i < records.size(); ++i) {
    std::string where = path.string() + ": record " + std::to_string(i);
    if (!records[i].is_object()) throw LoadError(where + ": not an object");
    QAItem item;
    item.task = task;
    item.question_id = string_field(records[i], "_id", where);
    item.question = string_field(records[i], "question", where);
    item.gold_answers = {string_field(records[i], "answer", where)};
    items.push_back(std::move(item));
  }
  return items;
}

std::vector<QAItem> load_strategy(const std::filesystem::path& path, Task task) {
  auto records = read_json_array(path);
  std::vector<QAItem> items;
  for (std::size_t i = 0; i < records.size(); ++i) {
    std::string where = path.string() + ": record " + std::to_string(i);
    if (!records[i].is_object()) throw LoadError(where + ": not an object");
    QAItem item;
    item.task = task;
    item.question_id = string_field(records[i], "qid", where);
    item.question = render_yes_no(string_field(records[i], "question", where));
    auto answer = records[i].find("answer");
    if (answer == records[i].end() || !answer->is_boolean())
      throw LoadError(where + ": field 'answer' must be a boolean");
    item.gold_answers = {answer->get<bool>() ? "yes" : "no"};
    item.answer_style = AnswerStyle::YesNo;
    items.push_back(std::move(item));
  }
  return items;
}

std::string content_id(std::string_view prefix, const std::vector<std::string>& fields) {
  std::uint64_t h = strings::fnv1a("");
  for (const auto& f : fields) h = strings::fnv1a(f + "\x1f", h);
  return std::string(prefix) + "-" + strings::hex64(h);
}

std::vector<QAItem> load_mmlu(const std::filesystem::path& path, Task task) {
  auto rows = csv::parse(read_file(path));
  std::vector<QAItem> items;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    std::string where = path.string() + ": row " + std::to_string(i + 1);
    if (row.size() != 6) throw LoadError(where + ": expected 6 fields (question, A, B, C, D, answer), got " +
                                         std::to_string(row.size()));
    std::string letter(strings::trim(row[5]));
    if (letter.size() != 1 || letter[0] < 'A' || letter[0] > 'D')
      throw LoadError(where + ": field 'answer' must be one of A, B, C, D");
    if (strings::trim(row[0]).empty()) throw LoadError(where + ": field 'question' is empty");
    QAItem item;
    item.task = task;
    item.question_id = content_id("mmlu", row);
    for (int c = 0; c < 4; ++c) item.choices.push_back({static_cast<char>('A' + c), row[1 + c]});
    item.question = render_multi_choice(row[0], item.choices);
    item.gold_answers = {letter};
    item.answer_style = AnswerStyle::MultiChoice;
    items.push_back(std::move(item));
  }
  return items;
}

std::vector<QAItem> load_bamboogle(const std::filesystem::path& path, Task task) {
  auto rows = csv::parse(read_file(path));
  std::vector<QAItem> items;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    std::string where = path.string() + ": row " + std::to_string(i + 1);
    if (row.size() < 2) throw LoadError(where + ": expected fields (question, answer)");
    if (i == 0 && strings::iequals(strings::trim(row[0]), "question")) continue;
    if (strings::trim(row[0]).empty()) throw LoadError(where + ": field 'question' is empty");
    if (strings::trim(row[1]).empty()) throw LoadError(where + ": field 'answer' is empty");
    QAItem item;
    item.task = task;
    item.question_id = content_id("bamboogle", {row[0]});
    item.question = row[0];
    item.gold_answers = {row[1]};
    items.push_back(std::move(item));
  }
  return items;
}

}  // namespace

std::string_view to_string(Split split) noexcept {
  switch (split) {
    case Split::Train: return "train";
    case Split::Dev: return "dev";
    case Split::Test: return "test";
  }
  return "dev";
}

Split parse_split(std::string_view name) {
  for (auto s : {Split::Train, Split::Dev, Split::Test})
    if (strings::iequals(name, to_string(s))) return s;
  throw ConfigError("unknown split '" + std::string(name) + "' (expected train, dev or test)");
}

std::string_view to_string(DatasetFormat format) noexcept {
  switch (format) {
    case DatasetFormat::HotpotJson: return "hotpot_json";
    case DatasetFormat::StrategyJson: return "strategy_json";
    case DatasetFormat::MmluCsv: return "mmlu_csv";
    case DatasetFormat::BamboogleCsv: return "bamboogle_csv";
  }
  return "hotpot_json";
}

DatasetFormat parse_dataset_format(std::string_view name) {
  for (auto f : {DatasetFormat::HotpotJson, DatasetFormat::StrategyJson, DatasetFormat::MmluCsv,
                 DatasetFormat::BamboogleCsv})
    if (strings::iequals(name, to_string(f))) return f;
  throw ConfigError("unknown dataset format '" + std::string(name) + "'");
}

DatasetFormat default_format(Task task) noexcept {
  switch (task) {
    case Task::HotpotQA: return DatasetFormat::HotpotJson;
    case Task::Bamboogle: return DatasetFormat::BamboogleCsv;
    case Task::StrategyQA: return DatasetFormat::StrategyJson;
    case Task::MMLU: return DatasetFormat::MmluCsv;
  }
  return DatasetFormat::HotpotJson;
}

std::vector<QAItem> load(const SplitSpec& spec, const std::filesystem::path& path) {
  return load(spec, path, default_format(spec.task));
}

std::vector<QAItem> load(const SplitSpec& spec, const std::filesystem::path& path, DatasetFormat format) {
  std::vector<QAItem> items;
  switch (format) {
    case DatasetFormat::HotpotJson: items = load_hotpot(path, spec.task); break;
    case DatasetFormat::StrategyJson: items = load_strategy(path, spec.task); break;
    case DatasetFormat::MmluCsv: items = load_mmlu(path, spec.task); break;
    case DatasetFormat::BamboogleCsv: items = load_bamboogle(path, spec.task); break;
  }
  if (!spec.sample_size) return items;
  if (*spec.sample_size > items.size())
    throw LoadError(path.string() + ": sample of " + std::to_string(*spec.sample_size) + " exceeds the " +
                    std::to_string(items.size()) + " items in the split");
  return sample_items(std::move(items), *spec.sample_size, spec.seed);
}

std::vector<QAItem> sample_items(std::vector<QAItem> items, std::size_t n, std::uint64_t seed) {
  if (n > items.size())
    throw PreconditionError("sample of " + std::to_string(n) + " exceeds " + std::to_string(items.size()) + " items");
  std::stable_sort(items.begin(), items.end(),
                   [](const QAItem& a, const QAItem& b) { return a.question_id < b.question_id; });
  Rng rng(seed);
  rng.shuffle(items);
  items.resize(n);
  return items;
}

std::string render_multi_choice(std::string_view stem, const std::vector<Choice>& choices) {
  std::string out = "Single choice: ";
  out += strings::trim(stem);
  for (const auto& c : choices) {
    out += '\n';
    out += c.letter;
    out += ". ";
    out += c.text;
  }
  return out;
}

std::string render_yes_no(std::string_view question) {
  auto q = strings::trim(question);
  if (strings::istarts_with(q, "Yes or no:")) return std::string(q);
  return "Yes or no: " + std::string(q);
}

DatasetRegistry DatasetRegistry::from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("dataset registry must be a JSON object");
  auto resolve_path = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
  };
  DatasetRegistry registry;
  for (const auto& [name, spec] : j.items()) {
    Task task = parse_task(name);
    Entry entry;
    if (!spec.is_object()) throw ConfigError("dataset registry entry '" + name + "' must be an object");
    if (auto p = spec.find("path"); p != spec.end()) entry.path = resolve_path(p->get<std::string>());
    entry.format = spec.contains("format") ? parse_dataset_format(spec["format"].get<std::string>())
                                            : default_format(task);
    if (auto s = spec.find("splits"); s != spec.end()) {
      for (const auto& [split, path] : s->items()) entry.splits[parse_split(split)] = resolve_path(path.get<std::string>());
    }
    if (entry.path.empty() && entry.splits.empty())
      throw ConfigError("dataset registry entry '" + name + "' has neither path nor splits");
    registry.entries_[task] = std::move(entry);
  }
  return registry;
}

std::pair<std::filesystem::path, DatasetFormat> DatasetRegistry::resolve(Task task, Split split) const {
  auto it = entries_.find(task);
  if (it == entries_.end()) throw ConfigError("no dataset registered for task " + std::string(to_string(task)));
  const Entry& e = it->second;
  if (auto s = e.splits.find(split); s != e.splits.end()) return {s->second, e.format};
  if (e.path.empty())
    throw ConfigError("dataset " + std::string(to_string(task)) + " has no " + std::string(to_string(split)) +
                      " split");
  return {e.path, e.format};
}

std::vector<QAItem> DatasetRegistry::load(const SplitSpec& spec) const {
  auto [path, format] = resolve(spec.task, spec.split);
  return agentft::load(spec, path, format);
}

}  // namespace agentft
