// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "agentft/qa_item.hpp"

namespace agentft {

enum class Split { Train, Dev, Test };

std::string_view to_string(Split split) noexcept;
Split parse_split(std::string_view name);

/// On-disk formats:
///  - HotpotJson:     JSON array of {"_id", "question", "answer"}
///  - StrategyJson:   JSON array of {"qid", "question", "answer": bool}
///  - MmluCsv:        headerless CSV rows: question, A, B, C, D, answer-letter
///  - BamboogleCsv:   CSV rows: question, answer (optional header row)
enum class DatasetFormat { HotpotJson, StrategyJson, MmluCsv, BamboogleCsv };

std::string_view to_string(DatasetFormat format) noexcept;
DatasetFormat parse_dataset_format(std::string_view name);
DatasetFormat default_format(Task task) noexcept;

struct SplitSpec {
  Task task = Task::HotpotQA;
  Split split = Split::Dev;
  /// nullopt loads everything.
  std::optional<std::size_t> sample_size;
  std::uint64_t seed = 0;
};

/// Parses, types answers, and samples without replacement when a sample size
/// is given. Throws LoadError naming the record and field on schema problems
/// and when the sample exceeds the split.
std::vector<QAItem> load(const SplitSpec& spec, const std::filesystem::path& path);
std::vector<QAItem> load(const SplitSpec& spec, const std::filesystem::path& path, DatasetFormat format);

/// Canonical order (by question_id), then a seeded shuffle; the first `n`
/// items. Prefixes are nested: a smaller n yields a subset of a larger one.
std::vector<QAItem> sample_items(std::vector<QAItem> items, std::size_t n, std::uint64_t seed);

/// "Single choice: <stem>\nA. ..\nB. .." as used by the multi-choice prompts.
std::string render_multi_choice(std::string_view stem, const std::vector<Choice>& choices);

/// Prefixes "Yes or no: " unless already present.
std::string render_yes_no(std::string_view question);

/// task -> {path, format, splits: {train|dev|test: path}}
class DatasetRegistry {
 public:
  struct Entry {
    std::filesystem::path path;
    DatasetFormat format = DatasetFormat::HotpotJson;
    std::map<Split, std::filesystem::path> splits;
  };

  static DatasetRegistry from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

  /// Path and format for a split; falls back to the entry's `path`.
  std::pair<std::filesystem::path, DatasetFormat> resolve(Task task, Split split) const;
  std::vector<QAItem> load(const SplitSpec& spec) const;

 private:
  std::map<Task, Entry> entries_;
};

}  // namespace agentft
