// SPDX-License-Identifier: Apache-2.0
#include "agentft/toolbox.hpp"

#include <fstream>

#include <spdlog/spdlog.h>

#include "agentft/error.hpp"
#include "agentft/jsonl.hpp"
#include "agentft/strings.hpp"

namespace agentft {

using jsonl::Json;

namespace {

const nlohmann::json* member(const nlohmann::json& j, const char* key) {
  if (!j.is_object()) return nullptr;
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

std::optional<std::string> non_empty_string(const nlohmann::json* j) {
  if (j && j->is_string() && !strings::trim(j->get_ref<const std::string&>()).empty()) return j->get<std::string>();
  return std::nullopt;
}

}  // namespace

std::string extract_answer(const nlohmann::json& raw) {
  if (const auto* box = member(raw, "answer_box")) {
    if (auto a = non_empty_string(member(*box, "answer"))) return *a;
    if (auto s = non_empty_string(member(*box, "snippet"))) return *s;
    if (const auto* words = member(*box, "snippet_highlighted_words"); words && words->is_array()) {
      std::vector<std::string> parts;
      for (const auto& w : *words)
        if (w.is_string()) parts.push_back(w.get<std::string>());
      if (!parts.empty()) return strings::join(parts, ", ");
    }
  }
  if (const auto* organic = member(raw, "organic_results"); organic && organic->is_array() && !organic->empty()) {
    if (auto s = non_empty_string(member(organic->front(), "snippet"))) return *s;
  }
  return std::string(kNoneObservation);
}

ObservationPool::ObservationPool(std::filesystem::path file) : file_(std::move(file)) {
  if (!std::filesystem::exists(*file_)) return;
  jsonl::for_each(*file_, [&](const Json& j, std::size_t line) {
    auto it = j.find("obs");
    if (it == j.end() || !it->is_string())
      throw LoadError(file_->string() + ":" + std::to_string(line) + ": expected {\"obs\": string}");
    observations_.push_back(it->get<std::string>());
  });
}

void ObservationPool::add(std::string observation) {
  std::lock_guard lock(mutex_);
  if (file_) jsonl::append(*file_, Json{{"obs", observation}});
  observations_.push_back(std::move(observation));
}

std::size_t ObservationPool::size() const {
  std::lock_guard lock(mutex_);
  return observations_.size();
}

std::vector<std::string> ObservationPool::snapshot() const {
  std::lock_guard lock(mutex_);
  return observations_;
}

std::string ObservationPool::sample(Rng& rng) const {
  std::lock_guard lock(mutex_);
  if (observations_.empty()) throw PreconditionError("cannot sample an empty observation pool");
  return observations_[static_cast<std::size_t>(rng.uniform_index(observations_.size()))];
}

SearchTool::SearchTool(SearchToolOptions options, std::shared_ptr<HttpClient> http,
                       std::shared_ptr<ObservationPool> pool, std::shared_ptr<RateLimiter> limiter)
    : options_(std::move(options)), http_(std::move(http)), pool_(std::move(pool)), limiter_(std::move(limiter)) {}

std::string SearchTool::search(std::string_view query) {
  std::string key(strings::trim(query));
  if (key.empty()) throw PreconditionError("search query is empty");
  if (options_.api_key.empty()) throw PreconditionError("search API key is not configured (SERPAPI_KEY)");

  std::promise<std::optional<std::string>> promise;
  std::shared_future<std::optional<std::string>> result;
  bool owner = false;
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) {
      result = it->second;
    } else {
      result = promise.get_future().share();
      cache_.emplace(key, result);
      owner = true;
    }
  }
  if (owner) {
    auto fetched = fetch(key);
    if (!fetched) {
      std::lock_guard lock(cache_mutex_);
      cache_.erase(key);
    }
    promise.set_value(fetched);
  }
  auto value = result.get();
  return value ? *value : std::string(kNoneObservation);
}

std::optional<std::string> SearchTool::fetch(const std::string& query) {
  ++http_calls_;
  HttpParams params{{"q", query}, {"engine", options_.engine}, {"api_key", options_.api_key}};
  HttpResponse response;
  try {
    response = send_with_retry(options_.retry, limiter_.get(), "search",
                               [&] { return http_->get(options_.path, params, {}); });
  } catch (const TransportError& e) {
    spdlog::warn("search for '{}' failed: {}", query, e.what());
    return std::nullopt;
  }
  nlohmann::json payload;
  try {
    payload = nlohmann::json::parse(response.body);
  } catch (const nlohmann::json::parse_error&) {
    payload = nlohmann::json::object();
  }
  std::string observation = extract_answer(payload);
  if (pool_ && observation != kNoneObservation) pool_->add(observation);
  return observation;
}

std::string FixtureTool::search(std::string_view query) {
  auto key = strings::trim(query);
  if (key.empty()) throw PreconditionError("search query is empty");
  auto it = observations_.find(key);
  return it == observations_.end() ? std::string(kNoneObservation) : it->second;
}

std::shared_ptr<FixtureSearchHttp> FixtureSearchHttp::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("search fixture not found: " + path.string());
  try {
    return std::make_shared<FixtureSearchHttp>(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("search fixture " + path.string() + ": " + e.what());
  }
}

HttpResponse FixtureSearchHttp::get(const std::string&, const HttpParams& params, const HttpHeaders&) {
  auto q = params.find("q");
  if (q == params.end()) return {400, R"({"error":"missing q"})"};
  if (auto it = payloads_.find(q->second); it != payloads_.end()) return {200, it->dump()};
  return {200, "{}"};
}

std::string_view to_string(PerturbationMode mode) noexcept {
  switch (mode) {
    case PerturbationMode::Off: return "off";
    case PerturbationMode::NoneMode: return "none";
    case PerturbationMode::RandomMode: return "random";
  }
  return "off";
}

PerturbationMode parse_perturbation_mode(std::string_view name) {
  for (auto m : {PerturbationMode::Off, PerturbationMode::NoneMode, PerturbationMode::RandomMode})
    if (strings::iequals(name, to_string(m))) return m;
  throw ConfigError("unknown perturbation mode '" + std::string(name) + "' (expected off, none or random)");
}

PerturbedTool::PerturbedTool(std::shared_ptr<Tool> inner, PerturbationConfig cfg,
                             std::shared_ptr<ObservationPool> pool)
    : inner_(std::move(inner)), cfg_(cfg), rng_(cfg.seed) {
  if (!inner_) throw ConfigError("perturbation: no inner tool");
  if (!(cfg_.probability >= 0.0 && cfg_.probability <= 1.0))
    throw ConfigError("perturbation probability must lie in [0, 1]");
  if (cfg_.mode == PerturbationMode::RandomMode) {
    if (pool) frozen_pool_ = pool->snapshot();
    if (frozen_pool_.empty()) throw ConfigError("random perturbation needs a non-empty observation pool");
  }
}

std::string PerturbedTool::search(std::string_view query) {
  if (cfg_.mode == PerturbationMode::Off) {
    {
      std::lock_guard lock(mutex_);
      decisions_.push_back(false);
    }
    return inner_->search(query);
  }
  std::string replacement;
  bool replace;
  {
    std::lock_guard lock(mutex_);
    replace = rng_.bernoulli(cfg_.probability);
    decisions_.push_back(replace);
    if (replace && cfg_.mode == PerturbationMode::RandomMode)
      replacement = frozen_pool_[static_cast<std::size_t>(rng_.uniform_index(frozen_pool_.size()))];
  }
  if (!replace) return inner_->search(query);
  if (cfg_.mode == PerturbationMode::NoneMode) return std::string(kNoneObservation);
  return replacement;
}

std::size_t PerturbedTool::calls() const {
  std::lock_guard lock(mutex_);
  return decisions_.size();
}

std::size_t PerturbedTool::replaced() const {
  std::lock_guard lock(mutex_);
  return static_cast<std::size_t>(std::count(decisions_.begin(), decisions_.end(), true));
}

std::vector<bool> PerturbedTool::decisions() const {
  std::lock_guard lock(mutex_);
  return decisions_;
}

}  // namespace agentft
