// SPDX-License-Identifier: Apache-2.0
#include "agentft/lm.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "agentft/strings.hpp"

namespace agentft {

std::string truncate_at_stop(std::string_view text, std::span<const std::string> stops) {
  std::size_t cut = text.size();
  for (const auto& s : stops) {
    if (s.empty()) continue;
    cut = std::min(cut, text.find(s));
  }
  return std::string(text.substr(0, cut));
}

ScriptedLanguageModel::ScriptedLanguageModel(std::vector<std::string> responses, TokenUsage usage_per_call)
    : queue_(std::make_move_iterator(responses.begin()), std::make_move_iterator(responses.end())),
      usage_(usage_per_call) {}

Generation ScriptedLanguageModel::generate(const GenerationRequest& request) {
  std::lock_guard lock(mutex_);
  seen_.push_back(request);
  if (queue_.empty()) throw ScriptExhausted("scripted model has no responses left");
  std::string text = std::move(queue_.front());
  queue_.pop_front();
  return {std::move(text), usage_};
}

void ScriptedLanguageModel::push(std::string response) {
  std::lock_guard lock(mutex_);
  queue_.push_back(std::move(response));
}

std::size_t ScriptedLanguageModel::remaining() const {
  std::lock_guard lock(mutex_);
  return queue_.size();
}

std::size_t ScriptedLanguageModel::calls() const {
  std::lock_guard lock(mutex_);
  return seen_.size();
}

std::vector<GenerationRequest> ScriptedLanguageModel::requests() const {
  std::lock_guard lock(mutex_);
  return seen_;
}

namespace {

/// Question text from the first user turn ("Question: q[\n<reflection>]").
std::string question_of(const GenerationRequest& request) {
  for (const auto& m : request.messages) {
    if (m.role != "user") continue;
    std::string_view content = m.content;
    constexpr std::string_view kPrefix = "Question: ";
    if (content.substr(0, kPrefix.size()) == kPrefix) content.remove_prefix(kPrefix.size());
    std::string suffix = "\n" + std::string(kReflectionInstruction);
    if (content.size() >= suffix.size() && content.substr(content.size() - suffix.size()) == suffix)
      content.remove_suffix(suffix.size());
    return std::string(content);
  }
  return {};
}

}  // namespace

void ReplayLanguageModel::add_script(std::string question, std::vector<std::string> responses) {
  scripts_[std::move(question)] = std::move(responses);
}

Generation ReplayLanguageModel::generate(const GenerationRequest& request) {
  std::string question = question_of(request);
  std::size_t turn = 0;
  for (const auto& m : request.messages)
    if (m.role == "assistant") ++turn;
  auto it = scripts_.find(question);
  if (it != scripts_.end() && turn < it->second.size()) return {it->second[turn], usage_};
  if (fallback_) return {*fallback_, usage_};
  throw ScriptExhausted("no replay response for turn " + std::to_string(turn) + " of '" + question + "'");
}

std::shared_ptr<ReplayLanguageModel> ReplayLanguageModel::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("replay script not found: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("replay script " + path + ": " + e.what());
  }
  TokenUsage usage;
  if (auto u = j.find("usage"); u != j.end()) {
    usage.prompt_tokens = u->value("prompt_tokens", std::int64_t{0});
    usage.completion_tokens = u->value("completion_tokens", std::int64_t{0});
  }
  auto model = std::make_shared<ReplayLanguageModel>(usage);
  if (auto f = j.find("fallback"); f != j.end() && f->is_string()) model->set_fallback(f->get<std::string>());
  if (auto s = j.find("scripts"); s != j.end()) {
    for (const auto& [question, responses] : s->items())
      model->add_script(question, responses.get<std::vector<std::string>>());
  }
  return model;
}

ChatCompletionClient::ChatCompletionClient(ChatClientOptions options, std::shared_ptr<HttpClient> http,
                                           std::shared_ptr<RateLimiter> limiter)
    : options_(std::move(options)), http_(std::move(http)), limiter_(std::move(limiter)) {
  if (options_.model.empty()) throw ConfigError("chat client: model id is empty");
  if (!http_) throw ConfigError("chat client: no HTTP client");
}

Generation ChatCompletionClient::generate(const GenerationRequest& request) {
  nlohmann::json messages = nlohmann::json::array();
  if (request.messages.empty()) {
    messages.push_back({{"role", "user"}, {"content", request.prompt}});
  } else {
    for (const auto& m : request.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
  }
  nlohmann::json body = {{"model", options_.model},
                         {"messages", std::move(messages)},
                         {"temperature", request.temperature},
                         {"max_tokens", request.max_tokens}};
  if (!request.stop.empty()) body["stop"] = request.stop;
  const std::string payload = body.dump();

  HttpHeaders headers;
  if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);

  HttpResponse response = send_with_retry(options_.retry, limiter_.get(), "chat completion", [&] {
    return http_->post_json("/v1/chat/completions", payload, headers);
  });

  Generation generation;
  try {
    auto j = nlohmann::json::parse(response.body);
    const auto& content = j.at("choices").at(0).at("message").at("content");
    std::string text = content.is_null() ? std::string() : content.get<std::string>();
    generation.text = truncate_at_stop(text, request.stop);
    if (auto u = j.find("usage"); u != j.end()) {
      generation.usage.prompt_tokens = u->value("prompt_tokens", std::int64_t{0});
      generation.usage.completion_tokens = u->value("completion_tokens", std::int64_t{0});
    }
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(response.status, response.body, std::string("chat completion: malformed response: ") + e.what());
  }
  std::lock_guard lock(usage_mutex_);
  total_ += generation.usage;
  return generation;
}

TokenUsage ChatCompletionClient::total_usage() const {
  std::lock_guard lock(usage_mutex_);
  return total_;
}

}  // namespace agentft
