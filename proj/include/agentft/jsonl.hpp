// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace agentft::jsonl {

using Json = nlohmann::ordered_json;

/// Calls `fn(record, line_number)` for each non-blank line. Throws LoadError
/// naming the file and 1-based line on malformed JSON.
void for_each(const std::filesystem::path& path, const std::function<void(const Json&, std::size_t)>& fn);

std::vector<Json> read(const std::filesystem::path& path);
void write(const std::filesystem::path& path, const std::vector<Json>& records);
void append(const std::filesystem::path& path, const Json& record);

/// Compact single-line dump with invalid UTF-8 replaced rather than thrown.
std::string dump_line(const Json& record);

}  // namespace agentft::jsonl
