// SPDX-License-Identifier: Apache-2.0
#include "agentft/finetune.hpp"

#include <fstream>
#include <sstream>

#include "agentft/error.hpp"
#include "agentft/strings.hpp"

namespace agentft {
namespace {

int rank(JobStatus s) {
  switch (s) {
    case JobStatus::Pending: return 0;
    case JobStatus::Running: return 1;
    case JobStatus::Succeeded:
    case JobStatus::Failed: return 2;
  }
  return 0;
}

/// Provider error text: error.message when the body is a JSON error, else the body.
std::string provider_message(const std::string& body) {
  try {
    auto j = nlohmann::json::parse(body);
    if (auto e = j.find("error"); e != j.end()) {
      if (e->is_object() && e->contains("message")) return e->at("message").get<std::string>();
      if (e->is_string()) return e->get<std::string>();
    }
  } catch (const nlohmann::json::exception&) {
  }
  return body;
}

FineTuneJob failed(FineTuneJob job, std::string message) {
  job.status = JobStatus::Failed;
  job.message = std::move(message);
  return job;
}

}  // namespace

std::string_view to_string(JobStatus status) noexcept {
  switch (status) {
    case JobStatus::Pending: return "pending";
    case JobStatus::Running: return "running";
    case JobStatus::Succeeded: return "succeeded";
    case JobStatus::Failed: return "failed";
  }
  return "pending";
}

JobStatus parse_job_status(std::string_view name) {
  for (auto s : {JobStatus::Pending, JobStatus::Running, JobStatus::Succeeded, JobStatus::Failed})
    if (strings::iequals(name, to_string(s))) return s;
  throw ConfigError("unknown job status '" + std::string(name) + "'");
}

JobStatus map_provider_status(std::string_view s) {
  if (s == "validating_files" || s == "queued" || s == "created" || s == "pending") return JobStatus::Pending;
  if (s == "running") return JobStatus::Running;
  if (s == "succeeded") return JobStatus::Succeeded;
  if (s == "failed" || s == "cancelled") return JobStatus::Failed;
  throw Error("unknown provider job status '" + std::string(s) + "'");
}

nlohmann::json FineTuneJob::to_json() const {
  return {{"job_id", job_id},         {"status", to_string(status)}, {"training_file", training_file_ref},
          {"base_model", base_model}, {"epochs", epochs},            {"fine_tuned_model", fine_tuned_model},
          {"message", message}};
}

FineTuneJob FineTuneJob::from_json(const nlohmann::json& j) {
  FineTuneJob job;
  try {
    job.job_id = j.at("job_id").get<std::string>();
    job.status = parse_job_status(j.at("status").get<std::string>());
    job.training_file_ref = j.value("training_file", "");
    job.base_model = j.value("base_model", "");
    job.epochs = j.value("epochs", 3);
    job.fine_tuned_model = j.value("fine_tuned_model", "");
    job.message = j.value("message", "");
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("fine-tune job record: ") + e.what());
  }
  return job;
}

std::string validate_chat_export(const std::filesystem::path& training_file) {
  std::ifstream in(training_file);
  if (!in) return "cannot open " + training_file.string();
  std::string line;
  std::size_t number = 0;
  std::size_t records = 0;
  while (std::getline(in, line)) {
    ++number;
    if (strings::trim(line).empty()) continue;
    auto where = "line " + std::to_string(number) + ": ";
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      return where + "invalid JSON";
    }
    auto messages = j.find("messages");
    if (!j.is_object() || messages == j.end() || !messages->is_array() || messages->empty())
      return where + "missing \"messages\" array";
    bool has_assistant = false;
    for (const auto& m : *messages) {
      if (!m.is_object() || !m.contains("role") || !m.contains("content") || !m["role"].is_string() ||
          !m["content"].is_string())
        return where + "message without string role/content";
      auto role = m["role"].get<std::string>();
      if (role != "system" && role != "user" && role != "assistant") return where + "unknown role '" + role + "'";
      has_assistant = has_assistant || role == "assistant";
    }
    if (!has_assistant) return where + "no assistant message";
    ++records;
  }
  if (records == 0) return "training file has no records";
  return {};
}

FineTuneClient::FineTuneClient(std::shared_ptr<HttpClient> http, std::string api_key, RetryPolicy retry)
    : http_(std::move(http)), api_key_(std::move(api_key)), retry_(std::move(retry)) {}

HttpHeaders FineTuneClient::auth() const {
  HttpHeaders h;
  if (!api_key_.empty()) h.emplace("Authorization", "Bearer " + api_key_);
  return h;
}

FineTuneJob FineTuneClient::submit(const std::filesystem::path& training_file, const std::string& base_model,
                                   int epochs) {
  FineTuneJob job;
  job.base_model = base_model;
  job.epochs = epochs;
  if (epochs < 1) return failed(job, "epochs must be at least 1");
  if (auto problem = validate_chat_export(training_file); !problem.empty())
    return failed(job, "validation: " + problem);

  std::ifstream in(training_file, std::ios::binary);
  std::ostringstream content;
  content << in.rdbuf();

  try {
    std::vector<MultipartField> fields = {
        {"purpose", "fine-tune", "", ""},
        {"file", content.str(), training_file.filename().string(), "application/jsonl"},
    };
    auto upload = send_with_retry(retry_, nullptr, "file upload",
                                  [&] { return http_->post_multipart("/v1/files", fields, auth()); });
    job.training_file_ref = nlohmann::json::parse(upload.body).at("id").get<std::string>();

    nlohmann::json body = {{"training_file", job.training_file_ref},
                           {"model", base_model},
                           {"hyperparameters", {{"n_epochs", epochs}}}};
    auto created = send_with_retry(retry_, nullptr, "fine-tune job create",
                                   [&] { return http_->post_json("/v1/fine_tuning/jobs", body.dump(), auth()); });
    auto j = nlohmann::json::parse(created.body);
    job.job_id = j.at("id").get<std::string>();
    job.status = map_provider_status(j.value("status", "queued"));
    if (auto m = j.find("fine_tuned_model"); m != j.end() && m->is_string()) job.fine_tuned_model = *m;
  } catch (const TransportError& e) {
    if (e.status() >= 400 && e.status() < 500) return failed(job, provider_message(e.body()));
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(200, "", std::string("fine-tune: malformed provider response: ") + e.what());
  }
  return job;
}

FineTuneJob FineTuneClient::poll(const FineTuneJob& job) {
  if (job.terminal() || job.job_id.empty()) return job;
  auto response = send_with_retry(retry_, nullptr, "fine-tune job poll", [&] {
    return http_->get("/v1/fine_tuning/jobs/" + job.job_id, {}, auth());
  });
  FineTuneJob next = job;
  try {
    auto j = nlohmann::json::parse(response.body);
    JobStatus status = map_provider_status(j.at("status").get<std::string>());
    if (rank(status) >= rank(job.status)) next.status = status;
    if (auto m = j.find("fine_tuned_model"); m != j.end() && m->is_string()) next.fine_tuned_model = *m;
    if (next.status == JobStatus::Failed) {
      if (auto e = j.find("error"); e != j.end() && e->is_object() && e->contains("message"))
        next.message = e->at("message").get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(response.status, response.body, std::string("fine-tune poll: ") + e.what());
  }
  return next;
}

}  // namespace agentft
