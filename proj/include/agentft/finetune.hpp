// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "agentft/http.hpp"
#include "agentft/retry.hpp"

namespace agentft {

enum class JobStatus { Pending, Running, Succeeded, Failed };

std::string_view to_string(JobStatus status) noexcept;
JobStatus parse_job_status(std::string_view name);

struct FineTuneJob {
  std::string job_id;
  JobStatus status = JobStatus::Pending;
  std::string training_file_ref;
  std::string base_model;
  int epochs = 3;
  std::string fine_tuned_model;
  std::string message;

  bool terminal() const noexcept { return status == JobStatus::Succeeded || status == JobStatus::Failed; }

  nlohmann::json to_json() const;
  static FineTuneJob from_json(const nlohmann::json& j);
};

/// Maps provider status strings ("validating_files", "queued", "running",
/// "succeeded", "failed", "cancelled") onto JobStatus.
JobStatus map_provider_status(std::string_view provider_status);

/// Problems that make a chat-format training file unusable, or empty.
std::string validate_chat_export(const std::filesystem::path& training_file);

/// Delegates training to the provider's file + fine-tuning job endpoints.
class FineTuneClient {
 public:
  FineTuneClient(std::shared_ptr<HttpClient> http, std::string api_key, RetryPolicy retry = {});

  /// Validates locally, uploads, creates the job. Local or provider
  /// validation failures come back as a Failed job carrying the message.
  FineTuneJob submit(const std::filesystem::path& training_file, const std::string& base_model, int epochs = 3);

  /// Refreshes a job. Terminal jobs are returned unchanged without a request,
  /// and status never moves backwards.
  FineTuneJob poll(const FineTuneJob& job);

 private:
  HttpHeaders auth() const;

  std::shared_ptr<HttpClient> http_;
  std::string api_key_;
  RetryPolicy retry_;
};

}  // namespace agentft
