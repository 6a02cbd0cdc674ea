// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "agentft/curation.hpp"
#include "agentft/datasets.hpp"
#include "agentft/episode_config.hpp"
#include "agentft/toolbox.hpp"

namespace agentft {

using EnvLookup = std::function<std::optional<std::string>(std::string_view)>;

/// Reads the process environment.
EnvLookup process_env();

struct LmConfig {
  /// "chat" (OpenAI-style endpoint) or "replay" (scripted responses file).
  std::string kind = "chat";
  std::string model;
  bool fine_tuned = false;
  std::filesystem::path script;
  std::optional<double> temperature;
  double rate_per_second = 0.0;
  double burst = 1.0;
  int timeout_s = 60;
};

struct ToolConfig {
  /// "serpapi" or "fixture" (SerpAPI-shaped payloads served from a file).
  std::string kind = "serpapi";
  std::filesystem::path fixture;
  std::string base_url = "https://serpapi.com";
  PerturbationMode perturb = PerturbationMode::Off;
  double probability = 0.5;
  double rate_per_second = 0.0;
};

struct RunConfig {
  std::filesystem::path run_dir;
  Task task = Task::HotpotQA;
  std::vector<Method> methods = {Method::ReAct};
  std::optional<DatasetRegistry> datasets;
  Split generate_split = Split::Train;
  std::optional<std::size_t> generate_sample;
  Split eval_split = Split::Dev;
  std::optional<std::size_t> eval_sample;
  nlohmann::json episode = nlohmann::json::object();
  bool zero_shot = false;
  LmConfig lm;
  ToolConfig tool;
  std::filesystem::path curation_plan;
  std::filesystem::path prices;
  ExportFormat export_format = ExportFormat::ChatMessages;
  bool mask_observations = true;
  std::string finetune_base_model = "gpt-3.5-turbo";
  int finetune_epochs = 3;
  std::size_t concurrency = 1;
  std::uint64_t seed = 0;

  /// Method defaults overlaid with the "episode" block and --zero-shot.
  EpisodeConfig episode_for(Method method) const;
};

/// Keys a subcommand needs that `config` (plus the environment) lacks, as
/// dotted paths ("lm.model", "env SERPAPI_KEY").
std::vector<std::string> missing_keys(const nlohmann::json& config, std::string_view subcommand, const EnvLookup& env,
                                      bool run_dir_given);

/// Relative paths inside the file resolve against its directory.
RunConfig parse_run_config(const nlohmann::json& config, const std::filesystem::path& base_dir);

/// Entry point behind the `agentft` binary. Returns the exit status; errors
/// are written to `err` as one JSON line {"error": kind, "message": text}.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err,
            const EnvLookup& env = process_env());

}  // namespace agentft
