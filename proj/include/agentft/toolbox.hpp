// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "agentft/http.hpp"
#include "agentft/retry.hpp"
#include "agentft/rng.hpp"

namespace agentft {

inline constexpr std::string_view kNoneObservation = "None";

/// A search tool as seen by the agent. Shared across concurrent episodes.
class Tool {
 public:
  virtual ~Tool() = default;
  virtual std::string search(std::string_view query) = 0;
};

/// First present field of: answer_box.answer, answer_box.snippet,
/// answer_box.snippet_highlighted_words (joined by ", "), first organic
/// result's snippet. "None" when none is present; never throws.
std::string extract_answer(const nlohmann::json& raw);

/// Append-only store of observations from earlier runs, optionally mirrored
/// to a JSONL file of {"obs": ...} records.
class ObservationPool {
 public:
  ObservationPool() = default;
  /// Loads any existing records from `file` and appends new ones to it.
  explicit ObservationPool(std::filesystem::path file);

  void add(std::string observation);
  std::size_t size() const;
  std::vector<std::string> snapshot() const;
  /// Uniform member. Throws PreconditionError when empty.
  std::string sample(Rng& rng) const;

 private:
  mutable std::mutex mutex_;
  std::vector<std::string> observations_;
  std::optional<std::filesystem::path> file_;
};

struct SearchToolOptions {
  std::string api_key;
  std::string engine = "google";
  std::string path = "/search";
  RetryPolicy retry;
};

/// SerpAPI-backed search with a per-run query cache. Fetched observations
/// other than "None" are added to the pool.
class SearchTool final : public Tool {
 public:
  SearchTool(SearchToolOptions options, std::shared_ptr<HttpClient> http,
             std::shared_ptr<ObservationPool> pool = nullptr, std::shared_ptr<RateLimiter> limiter = nullptr);

  /// Throws PreconditionError on a blank query or missing API key. Transport
  /// failures are logged and yield "None" (uncached).
  std::string search(std::string_view query) override;

  std::size_t http_calls() const noexcept { return http_calls_.load(); }

 private:
  std::optional<std::string> fetch(const std::string& query);

  SearchToolOptions options_;
  std::shared_ptr<HttpClient> http_;
  std::shared_ptr<ObservationPool> pool_;
  std::shared_ptr<RateLimiter> limiter_;
  std::mutex cache_mutex_;
  std::unordered_map<std::string, std::shared_future<std::optional<std::string>>> cache_;
  std::atomic<std::size_t> http_calls_{0};
};

/// Observations looked up from a fixed query map; unknown queries give "None".
class FixtureTool final : public Tool {
 public:
  explicit FixtureTool(const std::map<std::string, std::string>& observations)
      : observations_(observations.begin(), observations.end()) {}
  std::string search(std::string_view query) override;

 private:
  std::map<std::string, std::string, std::less<>> observations_;
};

/// Serves SerpAPI-shaped payloads from a {"<query>": payload} map, for
/// running SearchTool without network access.
class FixtureSearchHttp final : public HttpClient {
 public:
  explicit FixtureSearchHttp(nlohmann::json payloads) : payloads_(std::move(payloads)) {}
  static std::shared_ptr<FixtureSearchHttp> from_file(const std::filesystem::path& path);

  HttpResponse get(const std::string& path, const HttpParams& params, const HttpHeaders& headers) override;
  HttpResponse post_json(const std::string&, const std::string&, const HttpHeaders&) override { return {404, ""}; }
  HttpResponse post_multipart(const std::string&, const std::vector<MultipartField>&, const HttpHeaders&) override {
    return {404, ""};
  }

 private:
  nlohmann::json payloads_;
};

enum class PerturbationMode { Off, NoneMode, RandomMode };

std::string_view to_string(PerturbationMode mode) noexcept;
/// Accepts off | none | random.
PerturbationMode parse_perturbation_mode(std::string_view name);

struct PerturbationConfig {
  PerturbationMode mode = PerturbationMode::Off;
  double probability = 0.5;
  std::uint64_t seed = 0;
};

/// Replaces observations of `inner` with probability `cfg.probability`:
/// "None" in NoneMode, a uniform member of the pool in RandomMode. The pool is
/// frozen at construction. Draws are serialized, so a fixed seed and call
/// order give the same decisions.
class PerturbedTool final : public Tool {
 public:
  /// Throws ConfigError for a probability outside [0, 1] or RandomMode with an
  /// empty pool.
  PerturbedTool(std::shared_ptr<Tool> inner, PerturbationConfig cfg, std::shared_ptr<ObservationPool> pool = nullptr);

  std::string search(std::string_view query) override;

  std::size_t calls() const;
  std::size_t replaced() const;
  /// Per-call replacement decisions in call order.
  std::vector<bool> decisions() const;

 private:
  std::shared_ptr<Tool> inner_;
  PerturbationConfig cfg_;
  std::vector<std::string> frozen_pool_;
  mutable std::mutex mutex_;
  Rng rng_;
  std::vector<bool> decisions_;
};

}  // namespace agentft
