// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agentft/context.hpp"
#include "agentft/error.hpp"
#include "agentft/http.hpp"
#include "agentft/retry.hpp"
#include "agentft/types.hpp"

namespace agentft {

/// One generation call. Chat backends read `messages`; text backends and
/// accounting read `prompt`. Both describe the same context.
struct GenerationRequest {
  std::string prompt;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  int max_tokens = 512;
  std::vector<std::string> stop;
};

struct Generation {
  std::string text;
  TokenUsage usage;
};

/// Shared by concurrent episodes; implementations must be thread-safe.
class LanguageModel {
 public:
  virtual ~LanguageModel() = default;
  /// Throws TransportError when the backend cannot be reached after retries.
  virtual Generation generate(const GenerationRequest& request) = 0;
};

/// Text up to (not including) the earliest occurrence of any stop sequence.
std::string truncate_at_stop(std::string_view text, std::span<const std::string> stops);

class ScriptExhausted : public Error {
 public:
  using Error::Error;
};

/// Pops canned responses FIFO and throws ScriptExhausted when empty, so a
/// runaway episode fails loudly instead of looping.
class ScriptedLanguageModel final : public LanguageModel {
 public:
  explicit ScriptedLanguageModel(std::vector<std::string> responses, TokenUsage usage_per_call = {});

  Generation generate(const GenerationRequest& request) override;

  void push(std::string response);
  std::size_t remaining() const;
  std::size_t calls() const;
  /// Requests seen so far, in order.
  std::vector<GenerationRequest> requests() const;

 private:
  mutable std::mutex mutex_;
  std::deque<std::string> queue_;
  TokenUsage usage_;
  std::vector<GenerationRequest> seen_;
};

/// Deterministic per-question scripts that are safe under concurrency: the
/// response for a request is chosen by the question it asks about and the
/// number of assistant turns already in `messages`.
class ReplayLanguageModel final : public LanguageModel {
 public:
  ReplayLanguageModel() = default;
  explicit ReplayLanguageModel(TokenUsage usage_per_call) : usage_(usage_per_call) {}

  void add_script(std::string question, std::vector<std::string> responses);
  /// Response used once a question's script is exhausted or missing. Without
  /// one, those cases throw ScriptExhausted.
  void set_fallback(std::string response) { fallback_ = std::move(response); }

  Generation generate(const GenerationRequest& request) override;

  /// Loads {"usage": {...}, "fallback": "...", "scripts": {"<question>": [..]}}.
  static std::shared_ptr<ReplayLanguageModel> from_json_file(const std::string& path);

 private:
  std::map<std::string, std::vector<std::string>, std::less<>> scripts_;
  std::optional<std::string> fallback_;
  TokenUsage usage_;
};

struct ChatClientOptions {
  std::string model;
  std::string api_key;
  RetryPolicy retry;
};

/// OpenAI-style POST /v1/chat/completions client.
class ChatCompletionClient final : public LanguageModel {
 public:
  ChatCompletionClient(ChatClientOptions options, std::shared_ptr<HttpClient> http,
                       std::shared_ptr<RateLimiter> limiter = nullptr);

  Generation generate(const GenerationRequest& request) override;

  TokenUsage total_usage() const;

 private:
  ChatClientOptions options_;
  std::shared_ptr<HttpClient> http_;
  std::shared_ptr<RateLimiter> limiter_;
  mutable std::mutex usage_mutex_;
  TokenUsage total_;
};

}  // namespace agentft
