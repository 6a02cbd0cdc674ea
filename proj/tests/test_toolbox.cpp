// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "agentft/toolbox.hpp"
#include "stub_server.hpp"
#include "support.hpp"

using namespace agentft;
using agentft::testing::StubServer;
using agentft::testing::TempDir;
using agentft::testing::count_lines;
using agentft::testing::write_file;
using nlohmann::json;

namespace {

RetryPolicy no_sleep() {
  RetryPolicy p;
  p.sleep = [](std::chrono::milliseconds) {};
  return p;
}

/// Counts requests; answers every query with `answer_box.answer = "<q>!"`
/// after an optional delay, or with `status` when nonzero.
class CountingSearchHttp final : public HttpClient {
 public:
  std::atomic<int> gets{0};
  std::atomic<int> status{0};
  std::chrono::milliseconds delay{0};
  HttpParams last_params;

  HttpResponse get(const std::string&, const HttpParams& params, const HttpHeaders&) override {
    ++gets;
    std::this_thread::sleep_for(delay);
    if (status != 0) return {status.load(), "unavailable"};
    last_params = params;
    auto q = params.find("q")->second;
    return {200, json{{"answer_box", {{"answer", q + "!"}}}}.dump()};
  }
  HttpResponse post_json(const std::string&, const std::string&, const HttpHeaders&) override { return {404, ""}; }
  HttpResponse post_multipart(const std::string&, const std::vector<MultipartField>&, const HttpHeaders&) override {
    return {404, ""};
  }
};

class EchoTool final : public Tool {
 public:
  std::string search(std::string_view q) override {
    ++calls;
    return "echo:" + std::string(q);
  }
  std::atomic<int> calls{0};
};

/// P(lo <= X <= hi) for X ~ Binomial(n, p), summed in log space.
double binomial_interval_mass(int n, double p, int lo, int hi) {
  double total = 0.0;
  for (int k = lo; k <= hi; ++k) {
    double log_pmf = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * std::log(p) +
                     (n - k) * std::log1p(-p);
    total += std::exp(log_pmf);
  }
  return total;
}

}  // namespace

// ---------------------------------------------------------------- extraction

TEST(ExtractAnswer, PriorityOrder) {
  EXPECT_EQ(extract_answer(json::parse(R"({"answer_box":{"answer":"X","snippet":"S"},
                                           "organic_results":[{"snippet":"Y"}]})")),
            "X");
  EXPECT_EQ(extract_answer(json::parse(R"({"answer_box":{"snippet":"S","snippet_highlighted_words":["h"]}})")), "S");
  EXPECT_EQ(extract_answer(json::parse(R"({"answer_box":{"snippet_highlighted_words":["a","b"]}})")), "a, b");
  EXPECT_EQ(extract_answer(json::parse(R"({"organic_results":[{"snippet":"Y"},{"snippet":"Z"}]})")), "Y");
  EXPECT_EQ(extract_answer(json::object()), "None");
}

TEST(ExtractAnswer, MalformedPayloadsAreAbsent) {
  for (const char* text : {"null", "[]", "42", R"("str")", R"({"answer_box":"x"})", R"({"answer_box":{"answer":7}})",
                           R"({"answer_box":{"answer":"  "}})", R"({"organic_results":{}})",
                           R"({"organic_results":[]})", R"({"organic_results":[3]})",
                           R"({"answer_box":{"snippet_highlighted_words":[1,2]}})"})
    EXPECT_EQ(extract_answer(json::parse(text)), "None") << text;
  // A broken higher tier falls through to a usable lower one.
  EXPECT_EQ(extract_answer(json::parse(R"({"answer_box":{"answer":null},"organic_results":[{"snippet":"Y"}]})")), "Y");
}

TEST(ExtractAnswer, TotalOverRandomPayloads) {
  std::mt19937_64 gen(11);
  const std::vector<json> leaves = {nullptr, 1, "", "text", json::array(), json::object(), json::array({"w"})};
  for (int i = 0; i < 2000; ++i) {
    json j = json::object();
    if (gen() % 2) {
      json box = gen() % 4 ? json::object() : leaves[gen() % leaves.size()];
      if (box.is_object()) {
        for (const char* k : {"answer", "snippet", "snippet_highlighted_words"})
          if (gen() % 2) box[k] = leaves[gen() % leaves.size()];
      }
      j["answer_box"] = box;
    }
    if (gen() % 2) j["organic_results"] = json::array({json{{"snippet", leaves[gen() % leaves.size()]}}});
    std::string out;
    ASSERT_NO_THROW(out = extract_answer(j)) << j.dump();
    EXPECT_FALSE(out.empty());
  }
}

// ---------------------------------------------------------------- search tool

TEST(SearchTool, CachesRepeatedQueries) {
  auto http = std::make_shared<CountingSearchHttp>();
  SearchTool tool({"key", "google", "/search", no_sleep()}, http);
  EXPECT_EQ(tool.search("a b"), "a b!");
  EXPECT_EQ(tool.search("a b"), "a b!");
  EXPECT_EQ(tool.search("  a b "), "a b!");
  EXPECT_EQ(http->gets.load(), 1);
  EXPECT_EQ(tool.http_calls(), 1u);
  EXPECT_EQ(tool.search("c"), "c!");
  EXPECT_EQ(http->gets.load(), 2);
}

TEST(SearchTool, ConcurrentCallersShareOneRequest) {
  auto http = std::make_shared<CountingSearchHttp>();
  http->delay = std::chrono::milliseconds(50);
  SearchTool tool({"key", "google", "/search", no_sleep()}, http);
  std::vector<std::thread> threads;
  std::vector<std::string> results(8);
  for (int i = 0; i < 8; ++i) threads.emplace_back([&, i] { results[i] = tool.search("same"); });
  for (auto& t : threads) t.join();
  EXPECT_EQ(http->gets.load(), 1);
  for (const auto& r : results) EXPECT_EQ(r, "same!");
}

TEST(SearchTool, Preconditions) {
  auto http = std::make_shared<CountingSearchHttp>();
  SearchTool tool({"key", "google", "/search", no_sleep()}, http);
  EXPECT_THROW(tool.search(""), PreconditionError);
  EXPECT_THROW(tool.search("   "), PreconditionError);
  SearchTool keyless({"", "google", "/search", no_sleep()}, http);
  EXPECT_THROW(keyless.search("q"), PreconditionError);
  EXPECT_EQ(http->gets.load(), 0);
}

TEST(SearchTool, TransportFailureYieldsNoneAndIsNotCached) {
  auto http = std::make_shared<CountingSearchHttp>();
  http->status = 503;
  auto opts = SearchToolOptions{"key", "google", "/search", no_sleep()};
  opts.retry.max_attempts = 2;
  auto pool = std::make_shared<ObservationPool>();
  SearchTool tool(opts, http, pool);
  EXPECT_EQ(tool.search("q"), "None");
  EXPECT_EQ(http->gets.load(), 2);
  http->status = 0;
  EXPECT_EQ(tool.search("q"), "q!");
  EXPECT_EQ(http->gets.load(), 3);
  EXPECT_EQ(pool->snapshot(), std::vector<std::string>{"q!"});
}

TEST(SearchTool, FeedsPoolExceptNone) {
  auto payloads = json::parse(R"({"hit":{"answer_box":{"answer":"found"}},"miss":{}})");
  auto pool = std::make_shared<ObservationPool>();
  SearchTool tool({"key", "google", "/search", no_sleep()}, std::make_shared<FixtureSearchHttp>(payloads), pool);
  EXPECT_EQ(tool.search("hit"), "found");
  EXPECT_EQ(tool.search("miss"), "None");
  EXPECT_EQ(tool.search("hit"), "found");
  EXPECT_EQ(pool->snapshot(), std::vector<std::string>{"found"});
}

TEST(SearchTool, FixturePayloadForUniverseDiameter) {
  auto payloads = json{{"what is the diameter of the universe",
                        {{"answer_box", {{"answer", "93 billion light-years"}}},
                         {"organic_results", {{{"snippet", "The observable universe is about 93 billion ..."}}}}}}};
  SearchTool tool({"key", "google", "/search", no_sleep()}, std::make_shared<FixtureSearchHttp>(payloads));
  EXPECT_EQ(tool.search("what is the diameter of the universe"), "93 billion light-years");
}

TEST(SearchTool, SendsSerpApiParameters) {
  StubServer stub;
  std::string q, engine, key, path;
  stub.server().Get("/search", [&](const httplib::Request& req, httplib::Response& res) {
    path = req.path;
    q = req.get_param_value("q");
    engine = req.get_param_value("engine");
    key = req.get_param_value("api_key");
    res.set_content(R"({"organic_results":[{"snippet":"from stub"}]})", "application/json");
  });
  stub.start();
  SearchTool tool({"serp-key", "google", "/search", no_sleep()}, make_http_client(stub.url(), 5));
  EXPECT_EQ(tool.search("elevation range of the High Plains?"), "from stub");
  EXPECT_EQ(q, "elevation range of the High Plains?");
  EXPECT_EQ(engine, "google");
  EXPECT_EQ(key, "serp-key");
}

TEST(SearchTool, NonJsonBodyIsNone) {
  StubServer stub;
  stub.server().Get("/search", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("<html>oops</html>", "text/html");
  });
  stub.start();
  SearchTool tool({"k", "google", "/search", no_sleep()}, make_http_client(stub.url(), 5));
  EXPECT_EQ(tool.search("x"), "None");
}

// ---------------------------------------------------------------- pool

TEST(ObservationPool, PersistsAndReloads) {
  TempDir dir;
  auto file = dir / "obs_pool.jsonl";
  {
    ObservationPool pool(file);
    pool.add("one");
    pool.add("two\nlines");
  }
  EXPECT_EQ(count_lines(file), 2u);
  ObservationPool reloaded(file);
  EXPECT_EQ(reloaded.snapshot(), (std::vector<std::string>{"one", "two\nlines"}));
  reloaded.add("three");
  EXPECT_EQ(ObservationPool(file).size(), 3u);

  write_file(dir / "bad.jsonl", "{\"text\":\"x\"}\n");
  EXPECT_THROW(ObservationPool(dir / "bad.jsonl"), LoadError);
}

TEST(ObservationPool, SamplingReturnsMembers) {
  ObservationPool pool;
  Rng rng(1);
  EXPECT_THROW(pool.sample(rng), PreconditionError);
  for (const char* s : {"a", "b", "c"}) pool.add(s);
  std::set<std::string> seen;
  for (int i = 0; i < 200; ++i) seen.insert(pool.sample(rng));
  EXPECT_EQ(seen, (std::set<std::string>{"a", "b", "c"}));
}

// ---------------------------------------------------------------- perturbation

TEST(PerturbedTool, OffIsPassthrough) {
  auto inner = std::make_shared<EchoTool>();
  PerturbedTool tool(inner, {PerturbationMode::Off, 1.0, 5});
  for (int i = 0; i < 50; ++i) EXPECT_EQ(tool.search("q" + std::to_string(i)), "echo:q" + std::to_string(i));
  EXPECT_EQ(tool.replaced(), 0u);
  EXPECT_EQ(inner->calls.load(), 50);
}

TEST(PerturbedTool, ProbabilityZeroAndOne) {
  auto inner = std::make_shared<EchoTool>();
  PerturbedTool never(inner, {PerturbationMode::NoneMode, 0.0, 5});
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(never.search("x"), "echo:x");
  EXPECT_EQ(never.replaced(), 0u);

  auto inner2 = std::make_shared<EchoTool>();
  PerturbedTool always(inner2, {PerturbationMode::NoneMode, 1.0, 5});
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(always.search("x"), "None");
  EXPECT_EQ(always.replaced(), 1000u);
  EXPECT_EQ(inner2->calls.load(), 0);
}

TEST(PerturbedTool, HalfProbabilityFractionMatchesBinomial) {
  // Under Binomial(10000, 0.5) the band [4800, 5200] holds all but ~6e-5 of
  // the mass, so a correct sampler lands inside for any fixed seed.
  const double mass = binomial_interval_mass(10000, 0.5, 4800, 5200);
  EXPECT_GT(mass, 0.9999);
  for (std::uint64_t seed : {0ull, 1ull, 42ull, 1234567ull}) {
    PerturbedTool tool(std::make_shared<EchoTool>(), {PerturbationMode::NoneMode, 0.5, seed});
    for (int i = 0; i < 10000; ++i) tool.search("x");
    double fraction = static_cast<double>(tool.replaced()) / 10000.0;
    EXPECT_GE(fraction, 0.48) << seed;
    EXPECT_LE(fraction, 0.52) << seed;
  }
}

TEST(PerturbedTool, SeedDeterminesDecisions) {
  auto run = [](std::uint64_t seed) {
    PerturbedTool tool(std::make_shared<EchoTool>(), {PerturbationMode::NoneMode, 0.5, seed});
    for (int i = 0; i < 500; ++i) tool.search("x");
    return tool.decisions();
  };
  EXPECT_EQ(run(9), run(9));
  EXPECT_NE(run(9), run(10));
}

TEST(PerturbedTool, RandomModeDrawsFromFrozenPool) {
  auto pool = std::make_shared<ObservationPool>();
  for (const char* s : {"p1", "p2", "p3"}) pool->add(s);
  PerturbedTool tool(std::make_shared<EchoTool>(), {PerturbationMode::RandomMode, 0.5, 3}, pool);
  pool->add("late");
  std::set<std::string> replaced;
  for (int i = 0; i < 2000; ++i) {
    auto obs = tool.search("x");
    if (obs != "echo:x") replaced.insert(obs);
  }
  EXPECT_EQ(replaced, (std::set<std::string>{"p1", "p2", "p3"}));
}

TEST(PerturbedTool, ConfigErrors) {
  auto inner = std::make_shared<EchoTool>();
  EXPECT_THROW(PerturbedTool(inner, {PerturbationMode::RandomMode, 0.5, 1}), ConfigError);
  EXPECT_THROW(PerturbedTool(inner, {PerturbationMode::RandomMode, 0.5, 1}, std::make_shared<ObservationPool>()),
               ConfigError);
  EXPECT_THROW(PerturbedTool(inner, {PerturbationMode::NoneMode, 1.5, 1}), ConfigError);
  EXPECT_THROW(PerturbedTool(inner, {PerturbationMode::NoneMode, -0.1, 1}), ConfigError);
  EXPECT_THROW(PerturbedTool(nullptr, {PerturbationMode::Off, 0.5, 1}), ConfigError);
  EXPECT_EQ(parse_perturbation_mode("Random"), PerturbationMode::RandomMode);
  EXPECT_THROW(parse_perturbation_mode("sometimes"), ConfigError);
}

TEST(FixtureTool, LooksUpTrimmedQueries) {
  FixtureTool tool(std::map<std::string, std::string>{{"a", "b"}});
  EXPECT_EQ(tool.search(" a "), "b");
  EXPECT_EQ(tool.search("z"), "None");
  EXPECT_THROW(tool.search(""), PreconditionError);
}
