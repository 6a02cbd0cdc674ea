// SPDX-License-Identifier: Apache-2.0
#include "agentft/jsonl.hpp"

#include <fstream>

#include "agentft/error.hpp"
#include "agentft/strings.hpp"

namespace agentft::jsonl {

void for_each(const std::filesystem::path& path, const std::function<void(const Json&, std::size_t)>& fn) {
  std::ifstream in(path);
  if (!in) throw LoadError(path.string() + ": cannot open");
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (strings::trim(line).empty()) continue;
    Json record;
    try {
      record = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw LoadError(path.string() + ":" + std::to_string(number) + ": invalid JSON: " + e.what());
    }
    fn(record, number);
  }
}

std::vector<Json> read(const std::filesystem::path& path) {
  std::vector<Json> records;
  for_each(path, [&](const Json& j, std::size_t) { records.push_back(j); });
  return records;
}

std::string dump_line(const Json& record) {
  return record.dump(-1, ' ', false, Json::error_handler_t::replace);
}

void write(const std::filesystem::path& path, const std::vector<Json>& records) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(path.string() + ": cannot write");
  for (const auto& r : records) out << dump_line(r) << '\n';
}

void append(const std::filesystem::path& path, const Json& record) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw Error(path.string() + ": cannot append");
  out << dump_line(record) << '\n';
}

}  // namespace agentft::jsonl
