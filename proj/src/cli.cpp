// SPDX-License-Identifier: Apache-2.0
#include "agentft/cli.hpp"

#include <fcntl.h>
#include <signal.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "agentft/agent.hpp"
#include "agentft/error.hpp"
#include "agentft/evaluation.hpp"
#include "agentft/executor.hpp"
#include "agentft/finetune.hpp"
#include "agentft/jsonl.hpp"
#include "agentft/lm.hpp"
#include "agentft/pricing.hpp"
#include "agentft/strings.hpp"

namespace agentft {
namespace fs = std::filesystem;

EnvLookup process_env() {
  return [](std::string_view name) -> std::optional<std::string> {
    const char* value = std::getenv(std::string(name).c_str());
    if (!value || !*value) return std::nullopt;
    return std::string(value);
  };
}

namespace {

struct Flags {
  std::string config;
  std::string run_dir;
  std::optional<std::size_t> limit;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> concurrency;
  std::string perturb;
  bool zero_shot = false;
  std::string format;
  bool no_mask = false;
  std::vector<std::size_t> sizes;
  std::vector<std::string> matrices;
  std::string file;
};

/// Exclusive ownership of a run directory for the life of one command.
class RunDirLock {
 public:
  explicit RunDirLock(const fs::path& run_dir) : path_(run_dir / ".lock") {
    fs::create_directories(run_dir);
    for (int attempt = 0; attempt < 2; ++attempt) {
      int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
      if (fd >= 0) {
        auto pid = std::to_string(::getpid());
        if (::write(fd, pid.data(), pid.size()) < 0) spdlog::warn("could not record pid in {}", path_.string());
        ::close(fd);
        return;
      }
      if (errno != EEXIST) throw Error("cannot create lock file " + path_.string());
      if (!stale()) throw PreconditionError("run directory is locked by another process: " + path_.string());
      fs::remove(path_);
    }
    throw PreconditionError("could not acquire " + path_.string());
  }
  ~RunDirLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  RunDirLock(const RunDirLock&) = delete;
  RunDirLock& operator=(const RunDirLock&) = delete;

 private:
  bool stale() const {
    std::ifstream in(path_);
    long pid = 0;
    if (!(in >> pid) || pid <= 0) return true;
    return ::kill(static_cast<pid_t>(pid), 0) != 0 && errno == ESRCH;
  }

  fs::path path_;
};

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return "config";
  if (dynamic_cast<const LoadError*>(&e)) return "load";
  if (dynamic_cast<const PreconditionError*>(&e)) return "precondition";
  if (dynamic_cast<const TransportError*>(&e)) return "transport";
  if (dynamic_cast<const ExportError*>(&e)) return "export";
  if (dynamic_cast<const ConversionError*>(&e)) return "conversion";
  return "error";
}

void report_error(std::ostream& err, const std::string& kind, const std::string& message) {
  err << jsonl::dump_line(Json{{"error", kind}, {"message", message}}) << '\n';
}

const nlohmann::json* find_path(const nlohmann::json& j, std::string_view dotted) {
  const nlohmann::json* node = &j;
  std::size_t start = 0;
  while (start <= dotted.size()) {
    auto dot = dotted.find('.', start);
    auto key = std::string(dotted.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start));
    if (!node->is_object()) return nullptr;
    auto it = node->find(key);
    if (it == node->end() || it->is_null()) return nullptr;
    node = &*it;
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return node;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

std::string openai_base_url(const EnvLookup& env) {
  std::string url = env("OPENAI_BASE_URL").value_or("https://api.openai.com");
  while (!url.empty() && url.back() == '/') url.pop_back();
  if (url.size() >= 3 && url.compare(url.size() - 3, 3, "/v1") == 0) url.resize(url.size() - 3);
  return url;
}

std::shared_ptr<LanguageModel> make_lm(const RunConfig& rc, const EnvLookup& env) {
  if (rc.lm.kind == "replay") return ReplayLanguageModel::from_json_file(rc.lm.script.string());
  ChatClientOptions options;
  options.model = rc.lm.model;
  options.api_key = env("OPENAI_API_KEY").value_or("");
  std::shared_ptr<RateLimiter> limiter;
  if (rc.lm.rate_per_second > 0) limiter = std::make_shared<RateLimiter>(rc.lm.rate_per_second, rc.lm.burst);
  return std::make_shared<ChatCompletionClient>(options, make_http_client(openai_base_url(env), rc.lm.timeout_s),
                                                limiter);
}

std::shared_ptr<Tool> make_search_tool(const RunConfig& rc, const EnvLookup& env) {
  SearchToolOptions options;
  std::shared_ptr<HttpClient> http;
  if (rc.tool.kind == "fixture") {
    options.api_key = "fixture";
    http = FixtureSearchHttp::from_file(rc.tool.fixture);
  } else {
    options.api_key = env("SERPAPI_KEY").value_or("");
    http = make_http_client(rc.tool.base_url);
  }
  std::shared_ptr<RateLimiter> limiter;
  if (rc.tool.rate_per_second > 0) limiter = std::make_shared<RateLimiter>(rc.tool.rate_per_second, 1.0);
  return std::make_shared<SearchTool>(options, http, nullptr, limiter);
}

/// Reproducible runs record zero wall time so artifacts compare byte for byte.
EpisodeClock clock_for(const RunConfig& rc) {
  if (rc.lm.kind == "replay") return [] { return 0.0; };
  return steady_clock_seconds();
}

/// Search observations of finished trajectories, in order, go to the pool.
void feed_pool(ObservationPool& pool, const Trajectory& t) {
  for (const auto& r : t.rounds) {
    const auto* a = std::get_if<Action>(&r.action);
    if (a && !a->is_finish() && r.observation && *r.observation != kNoneObservation) pool.add(*r.observation);
  }
}

std::vector<QAItem> load_items(const RunConfig& rc, Split split, std::optional<std::size_t> sample,
                               std::optional<std::size_t> limit) {
  SplitSpec spec;
  spec.task = rc.task;
  spec.split = split;
  spec.sample_size = sample;
  spec.seed = rc.seed;
  auto items = rc.datasets->load(spec);
  if (!sample) {
    std::stable_sort(items.begin(), items.end(),
                     [](const QAItem& a, const QAItem& b) { return a.question_id < b.question_id; });
  }
  if (limit && *limit < items.size()) items.resize(*limit);
  return items;
}

std::string slug(Method method) { return strings::to_lower(to_string(method)); }
std::string slug(Task task) { return strings::to_lower(to_string(task)); }

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

nlohmann::json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

// ------------------------------------------------------------ subcommands

int cmd_generate(const RunConfig& rc, const Flags& flags, std::ostream& out, const EnvLookup& env) {
  auto items = load_items(rc, rc.generate_split, rc.generate_sample, flags.limit);
  auto lm = make_lm(rc, env);
  std::shared_ptr<Tool> tool = make_search_tool(rc, env);
  auto pool = std::make_shared<ObservationPool>(rc.run_dir / "obs_pool.jsonl");
  if (rc.tool.perturb != PerturbationMode::Off)
    tool = std::make_shared<PerturbedTool>(tool, PerturbationConfig{rc.tool.perturb, rc.tool.probability, rc.seed}, pool);
  auto clock = clock_for(rc);

  for (Method method : rc.methods) {
    auto cfg = rc.episode_for(method);
    fs::path file = rc.run_dir / "trajectories" / (slug(rc.task) + "-" + slug(method) + ".jsonl");
    std::set<std::string> done;
    if (fs::exists(file))
      for (const auto& t : read_trajectories(file)) done.insert(t.question_id);
    std::vector<const QAItem*> todo;
    for (const auto& item : items)
      if (!done.count(item.question_id)) todo.push_back(&item);

    std::size_t written = 0;
    std::size_t failed = 0;
    ordered_parallel_for<std::optional<Trajectory>>(
        todo.size(), rc.concurrency,
        [&](std::size_t i) -> std::optional<Trajectory> {
          try {
            return run_episode(cfg, *todo[i], *lm, *tool, PromptRegistry::bundled(), clock);
          } catch (const std::exception& e) {
            spdlog::warn("episode {} failed: {}", todo[i]->question_id, e.what());
            return std::nullopt;
          }
        },
        [&](std::size_t, std::optional<Trajectory> t) {
          if (!t) {
            ++failed;
            return;
          }
          append_trajectory(file, *t);
          feed_pool(*pool, *t);
          ++written;
        });
    out << jsonl::dump_line(Json{{"task", to_string(rc.task)},
                                 {"method", to_string(method)},
                                 {"written", written},
                                 {"skipped", items.size() - todo.size()},
                                 {"failed", failed},
                                 {"path", file.string()}})
        << '\n';
  }
  return 0;
}

CurationPlan load_plan(const RunConfig& rc) {
  auto raw = read_json_file(rc.curation_plan);
  auto plan = CurationPlan::from_json(raw);
  if (!raw.contains("seed")) plan.seed = rc.seed;
  return plan;
}

int cmd_curate(const RunConfig& rc, std::ostream& out) {
  auto plan = load_plan(rc);
  std::vector<Trajectory> all;
  fs::path dir = rc.run_dir / "trajectories";
  if (fs::exists(dir)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.path().extension() == ".jsonl") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      auto part = read_trajectories(f);
      all.insert(all.end(), part.begin(), part.end());
    }
  }
  std::vector<Trajectory> converted;
  for (auto& t : all) {
    if (t.method == Method::CoT) {
      if (t.reward != 1) continue;
      try {
        converted.push_back(cot_to_react(t));
      } catch (const ConversionError& e) {
        spdlog::warn("skipping {}: {}", t.question_id, e.what());
      }
    } else {
      converted.push_back(std::move(t));
    }
  }
  auto successful = deduplicate(filter_successful(converted, plan.filters));
  auto curated = mix(make_pools(successful), plan);
  write_trajectories(rc.run_dir / "curated.jsonl", curated);
  out << summarize_counts(curated, &plan) << '\n';
  return 0;
}

std::vector<Trajectory> curated_or_reviewed(const RunConfig& rc) {
  fs::path reviewed = rc.run_dir / "reviewed.jsonl";
  if (fs::exists(reviewed)) return read_trajectories(reviewed);
  fs::path curated = rc.run_dir / "curated.jsonl";
  if (!fs::exists(curated)) throw PreconditionError("no curated.jsonl in " + rc.run_dir.string() + "; run curate first");
  return read_trajectories(curated);
}

int cmd_review(const RunConfig& rc, std::istream& in, std::ostream& out) {
  fs::path curated = rc.run_dir / "curated.jsonl";
  if (!fs::exists(curated)) throw PreconditionError("no curated.jsonl in " + rc.run_dir.string() + "; run curate first");
  ReviewSession session(read_trajectories(curated), rc.run_dir / "review.jsonl");
  session.run(in, out);
  auto accepted = session.curated();
  if (session.complete()) write_trajectories(rc.run_dir / "reviewed.jsonl", accepted);
  out << jsonl::dump_line(Json{{"decided", session.next_index()},
                               {"complete", session.complete()},
                               {"accepted", accepted.size()}})
      << '\n';
  return 0;
}

int cmd_export(const RunConfig& rc, const Flags& flags, std::ostream& out) {
  auto trajectories = curated_or_reviewed(rc);
  ExportFormat format = flags.format.empty() ? rc.export_format : parse_export_format(flags.format);
  ExportOptions options;
  options.mask_observations = rc.mask_observations && !flags.no_mask;
  if (!flags.sizes.empty()) {
    auto steps = scaling_sweep(trajectories, flags.sizes, rc.seed, rc.run_dir / "exports" / "scaling", format, options);
    for (const auto& s : steps)
      out << jsonl::dump_line(Json{{"size", s.size}, {"plan", s.plan_path.string()}, {"path", s.export_path.string()}})
          << '\n';
    return 0;
  }
  std::string name(to_string(format));
  if (format == ExportFormat::PromptCompletion && !options.mask_observations) name += "_unmasked";
  fs::path path = rc.run_dir / "exports" / (name + ".jsonl");
  export_jsonl(trajectories, format, path, options);
  out << jsonl::dump_line(Json{{"format", to_string(format)}, {"records", trajectories.size()}, {"path", path.string()}})
      << '\n';
  return 0;
}

int cmd_finetune(const RunConfig& rc, const Flags& flags, std::ostream& out, std::ostream& err, const EnvLookup& env) {
  FineTuneClient client(make_http_client(openai_base_url(env)), env("OPENAI_API_KEY").value_or(""));
  fs::path job_file = rc.run_dir / "finetune_job.json";
  FineTuneJob job;
  if (fs::exists(job_file)) {
    job = client.poll(FineTuneJob::from_json(read_json_file(job_file)));
  } else {
    fs::path training = flags.file.empty() ? rc.run_dir / "exports" / "chat.jsonl" : fs::path(flags.file);
    job = client.submit(training, rc.finetune_base_model, rc.finetune_epochs);
  }
  if (!job.job_id.empty()) write_text(job_file, job.to_json().dump(2) + "\n");
  out << job.to_json().dump() << '\n';
  if (job.status == JobStatus::Failed) {
    report_error(err, "finetune", job.message);
    return 1;
  }
  return 0;
}

int cmd_evaluate(const RunConfig& rc, const Flags& flags, std::ostream& out, const EnvLookup& env) {
  auto items = load_items(rc, rc.eval_split, rc.eval_sample, flags.limit);
  auto lm = make_lm(rc, env);
  std::shared_ptr<Tool> tool = make_search_tool(rc, env);
  auto pool = std::make_shared<ObservationPool>(rc.run_dir / "obs_pool.jsonl");
  if (rc.tool.perturb != PerturbationMode::Off)
    tool = std::make_shared<PerturbedTool>(tool, PerturbationConfig{rc.tool.perturb, rc.tool.probability, rc.seed}, pool);

  std::optional<CostModel> cost;
  if (!rc.prices.empty()) {
    auto prices = PriceTable::load(rc.prices);
    if (prices.contains(rc.lm.model)) cost = CostModel{rc.lm.model, rc.lm.fine_tuned, prices};
  }

  Json reports = Json::array();
  for (Method method : rc.methods) {
    auto cfg = rc.episode_for(method);
    std::string label = slug(rc.task) + "-" + slug(method) + "-" + std::string(to_string(rc.tool.perturb));
    if (rc.zero_shot) label += "-zeroshot";
    fs::path dir = rc.run_dir / "eval" / label;
    EvalOptions options;
    options.concurrency = rc.concurrency;
    options.clock = clock_for(rc);
    options.records_path = dir / "records.jsonl";
    options.cost = cost ? &*cost : nullptr;
    auto result = run_eval(cfg, items, *lm, *tool, options);
    if (rc.tool.perturb == PerturbationMode::Off)
      for (const auto& t : result.trajectories) feed_pool(*pool, t);
    write_text(dir / "report.json", result.report.to_json().dump(2) + "\n");
    Json line = result.report.to_json();
    line.erase("turn_histogram");
    out << jsonl::dump_line(Json{{"run", label}, {"report", line}}) << '\n';
  }
  return 0;
}

int cmd_analyze(const RunConfig& rc, const Flags& flags, std::ostream& out) {
  if (flags.matrices.size() < 2) throw PreconditionError("analyze needs --matrices with at least two record files");
  std::vector<std::pair<std::string, std::vector<ItemRecord>>> runs;
  for (const auto& m : flags.matrices) {
    fs::path p(m);
    std::string name = p.stem().string() == "records" && p.has_parent_path() ? p.parent_path().filename().string()
                                                                             : p.stem().string();
    runs.emplace_back(name, read_item_records(p));
  }
  auto matrix = matrix_from_records(runs);
  auto bounds = method_choice_bounds(matrix);
  Json j;
  j["methods"] = matrix.method_names();
  j["questions"] = matrix.questions();
  j["per_method_em"] = bounds.per_method_em;
  j["best_single_em"] = bounds.best_single_em;
  j["random_em"] = bounds.random_em;
  j["oracle_em"] = bounds.oracle_em;
  write_text(rc.run_dir / "analysis.json", j.dump(2) + "\n");
  out << markdown_bounds_table(bounds, matrix.method_names());
  return 0;
}

int cmd_report(const RunConfig& rc, std::ostream& out) {
  std::vector<ReportRow> rows;
  fs::path eval_dir = rc.run_dir / "eval";
  if (fs::exists(eval_dir)) {
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(eval_dir))
      if (entry.is_directory() && fs::exists(entry.path() / "report.json")) dirs.push_back(entry.path());
    std::sort(dirs.begin(), dirs.end());
    for (const auto& d : dirs)
      rows.push_back({d.filename().string(), MetricReport::from_json(read_json_file(d / "report.json"))});
  }

  std::map<std::string, std::map<std::string, MetricReport>> by_base;
  for (const auto& r : rows) {
    for (std::string mode : {"off", "none", "random"}) {
      std::string suffix = "-" + mode;
      if (r.label.size() > suffix.size() && r.label.compare(r.label.size() - suffix.size(), suffix.size(), suffix) == 0)
        by_base[r.label.substr(0, r.label.size() - suffix.size())][mode] = r.report;
    }
  }
  std::vector<std::pair<std::string, RobustnessResult>> robustness;
  for (const auto& [base, modes] : by_base) {
    if (modes.size() != 3) continue;
    robustness.push_back({base, RobustnessResult{modes.at("off"), modes.at("none"), modes.at("random")}});
  }

  std::string md = "# Evaluation report\n\n## Metrics\n\n" + markdown_metrics_table(rows) + "\n## Cost per trial\n\n" +
                   markdown_cost_table(rows);
  if (!robustness.empty()) md += "\n## Observation robustness (EM)\n\n" + markdown_robustness_table(robustness);

  Json report;
  Json runs = Json::object();
  for (const auto& r : rows) {
    runs[r.label] = r.report.to_json();
    write_text(rc.run_dir / "histograms" / (r.label + ".csv"), histogram_csv(r.report.turn_histogram));
  }
  report["runs"] = std::move(runs);
  Json rob = Json::object();
  for (const auto& [base, r] : robustness) rob[base] = {{"normal", r.normal.em}, {"none", r.none.em}, {"random", r.random.em}};
  report["robustness"] = std::move(rob);

  fs::path analysis = rc.run_dir / "analysis.json";
  if (fs::exists(analysis)) {
    auto a = read_json_file(analysis);
    MethodChoiceBounds b;
    b.per_method_em = a.at("per_method_em").get<std::vector<double>>();
    b.random_em = a.at("random_em").get<double>();
    b.oracle_em = a.at("oracle_em").get<double>();
    md += "\n## Method choice\n\n" + markdown_bounds_table(b, a.at("methods").get<std::vector<std::string>>());
    report["method_choice"] = a;
  }
  write_text(rc.run_dir / "report.md", md);
  write_text(rc.run_dir / "report.json", report.dump(2) + "\n");
  out << md;
  return 0;
}

}  // namespace

EpisodeConfig RunConfig::episode_for(Method method) const {
  auto cfg = EpisodeConfig::for_method(method, task);
  if (lm.temperature) {
    cfg.temperature = *lm.temperature;
  } else if (!lm.model.empty()) {
    cfg.temperature = default_temperature(lm.model);
  }
  const auto& e = episode;
  try {
    if (method == Method::ReAct || method == Method::Reflexion) cfg.max_rounds = e.value("max_rounds", cfg.max_rounds);
    if (method == Method::Reflexion && e.contains("reflection_rounds"))
      cfg.reflection_rounds = e["reflection_rounds"].get<std::set<int>>();
    if (e.contains("temperature")) cfg.temperature = e["temperature"].get<double>();
    cfg.max_tokens = e.value("max_tokens", cfg.max_tokens);
    if (e.contains("stop")) cfg.stop_sequences = e["stop"].get<std::vector<std::string>>();
    if (e.contains("prompt_set")) cfg.prompt_set_id = e["prompt_set"].get<std::string>();
    cfg.zero_shot = zero_shot || e.value("zero_shot", false);
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("episode: ") + ex.what());
  }
  cfg.validate();
  return cfg;
}

std::vector<std::string> missing_keys(const nlohmann::json& config, std::string_view subcommand, const EnvLookup& env,
                                      bool run_dir_given) {
  std::vector<std::string> missing;
  auto need = [&](std::string_view key) {
    if (!find_path(config, key)) missing.emplace_back(key);
  };
  auto need_env = [&](std::string_view name) {
    if (!env(name)) missing.push_back("env " + std::string(name));
  };
  if (!run_dir_given) need("run_dir");
  if (subcommand == "generate" || subcommand == "evaluate") {
    need("task");
    need("datasets");
    need("lm.kind");
    auto kind = find_path(config, "lm.kind");
    if (kind && kind->is_string() && *kind == "replay") {
      need("lm.script");
    } else {
      need("lm.model");
      need_env("OPENAI_API_KEY");
    }
    auto tool = find_path(config, "tool.kind");
    if (tool && tool->is_string() && *tool == "fixture") {
      need("tool.fixture");
    } else {
      need_env("SERPAPI_KEY");
    }
  } else if (subcommand == "curate") {
    need("curation_plan");
  } else if (subcommand == "finetune") {
    need_env("OPENAI_API_KEY");
  }
  return missing;
}

RunConfig parse_run_config(const nlohmann::json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig rc;
  try {
    if (j.contains("run_dir")) rc.run_dir = resolve(base_dir, j["run_dir"].get<std::string>());
    if (j.contains("task")) rc.task = parse_task(j["task"].get<std::string>());
    if (j.contains("methods")) {
      rc.methods.clear();
      for (const auto& m : j["methods"]) rc.methods.push_back(parse_method(m.get<std::string>()));
    } else if (j.contains("method")) {
      rc.methods = {parse_method(j["method"].get<std::string>())};
    }
    if (auto d = j.find("datasets"); d != j.end()) {
      if (d->is_string()) {
        fs::path p = resolve(base_dir, d->get<std::string>());
        rc.datasets = DatasetRegistry::from_json(read_json_file(p), p.parent_path());
      } else {
        rc.datasets = DatasetRegistry::from_json(*d, base_dir);
      }
    }
    auto read_split = [&](const char* key, Split& split, std::optional<std::size_t>& sample) {
      auto it = j.find(key);
      if (it == j.end()) return;
      if (it->contains("split")) split = parse_split(it->at("split").get<std::string>());
      if (it->contains("sample_size") && !it->at("sample_size").is_null())
        sample = it->at("sample_size").get<std::size_t>();
    };
    read_split("generate", rc.generate_split, rc.generate_sample);
    read_split("evaluate", rc.eval_split, rc.eval_sample);
    if (j.contains("episode")) rc.episode = j["episode"];
    if (auto lm = j.find("lm"); lm != j.end()) {
      rc.lm.kind = lm->value("kind", rc.lm.kind);
      rc.lm.model = lm->value("model", "");
      rc.lm.fine_tuned = lm->value("fine_tuned", false);
      if (lm->contains("script")) rc.lm.script = resolve(base_dir, lm->at("script").get<std::string>());
      if (lm->contains("temperature")) rc.lm.temperature = lm->at("temperature").get<double>();
      rc.lm.rate_per_second = lm->value("rate_per_second", 0.0);
      rc.lm.burst = lm->value("burst", 1.0);
      rc.lm.timeout_s = lm->value("timeout_s", 60);
      if (rc.lm.kind != "chat" && rc.lm.kind != "replay")
        throw ConfigError("lm.kind must be chat or replay, got '" + rc.lm.kind + "'");
    }
    if (auto tool = j.find("tool"); tool != j.end()) {
      rc.tool.kind = tool->value("kind", rc.tool.kind);
      if (tool->contains("fixture")) rc.tool.fixture = resolve(base_dir, tool->at("fixture").get<std::string>());
      rc.tool.base_url = tool->value("base_url", rc.tool.base_url);
      if (tool->contains("perturb")) rc.tool.perturb = parse_perturbation_mode(tool->at("perturb").get<std::string>());
      rc.tool.probability = tool->value("probability", 0.5);
      rc.tool.rate_per_second = tool->value("rate_per_second", 0.0);
      if (rc.tool.kind != "serpapi" && rc.tool.kind != "fixture")
        throw ConfigError("tool.kind must be serpapi or fixture, got '" + rc.tool.kind + "'");
    }
    if (j.contains("curation_plan")) rc.curation_plan = resolve(base_dir, j["curation_plan"].get<std::string>());
    if (j.contains("prices")) rc.prices = resolve(base_dir, j["prices"].get<std::string>());
    if (auto e = j.find("export"); e != j.end()) {
      if (e->contains("format")) rc.export_format = parse_export_format(e->at("format").get<std::string>());
      rc.mask_observations = e->value("mask_observations", true);
    }
    if (auto f = j.find("finetune"); f != j.end()) {
      rc.finetune_base_model = f->value("base_model", rc.finetune_base_model);
      rc.finetune_epochs = f->value("epochs", rc.finetune_epochs);
    }
    rc.concurrency = j.value("concurrency", std::size_t{1});
    rc.seed = j.value("seed", std::uint64_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(e.what());
  }
  return rc;
}

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err,
            const EnvLookup& env) {
  CLI::App app{"Generate, curate, export and evaluate agent trajectories", "agentft"};
  app.require_subcommand(1);
  Flags flags;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "Run configuration JSON")->required();
    sub->add_option("--run-dir", flags.run_dir, "Override the run directory");
    sub->add_option("--seed", flags.seed, "Override the run seed");
    sub->add_option("--concurrency", flags.concurrency, "Episodes in flight");
  };
  auto* generate = app.add_subcommand("generate", "Run episodes over the training split");
  auto* curate = app.add_subcommand("curate", "Filter, convert and mix trajectories per the curation plan");
  auto* review = app.add_subcommand("review", "Interactively accept, reject or edit curated trajectories");
  auto* exporter = app.add_subcommand("export", "Write fine-tuning files");
  auto* finetune = app.add_subcommand("finetune", "Submit or poll a provider fine-tuning job");
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate on the evaluation split");
  auto* analyze = app.add_subcommand("analyze", "Method-choice bounds from per-item record files");
  auto* report = app.add_subcommand("report", "Render markdown and JSON report tables");
  for (auto* sub : {generate, curate, review, exporter, finetune, evaluate, analyze, report}) add_common(sub);
  for (auto* sub : {generate, evaluate}) {
    sub->add_option("--limit", flags.limit, "Use only the first N questions");
    sub->add_option("--perturb", flags.perturb, "Observation perturbation")
        ->check(CLI::IsMember({"off", "none", "random"}));
    sub->add_flag("--zero-shot", flags.zero_shot, "Render contexts without exemplars");
  }
  exporter->add_option("--format", flags.format, "chat or prompt_completion");
  exporter->add_flag("--no-mask", flags.no_mask, "Leave observation spans unmasked");
  exporter->add_option("--sizes", flags.sizes, "Scaling sweep sizes")->delimiter(',');
  finetune->add_option("--file", flags.file, "Training file (default exports/chat.jsonl)");
  analyze->add_option("--matrices", flags.matrices, "Per-item records.jsonl files, one per method")->expected(1, -1);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    report_error(err, "usage", e.what());
    return 2;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();

  try {
    nlohmann::json config = read_json_file(flags.config);
    if (!config.is_object()) throw ConfigError("config must be a JSON object");
    if (auto missing = missing_keys(config, command, env, !flags.run_dir.empty()); !missing.empty())
      throw ConfigError("missing keys: " + strings::join(missing, ", "));

    fs::path base = fs::path(flags.config).parent_path();
    RunConfig rc = parse_run_config(config, base);
    if (!flags.run_dir.empty()) rc.run_dir = flags.run_dir;
    if (flags.seed) rc.seed = *flags.seed;
    if (flags.concurrency) rc.concurrency = std::max<std::size_t>(1, *flags.concurrency);
    if (!flags.perturb.empty()) rc.tool.perturb = parse_perturbation_mode(flags.perturb);
    rc.zero_shot = rc.zero_shot || flags.zero_shot;

    RunDirLock lock(rc.run_dir);
    if (command == "generate") return cmd_generate(rc, flags, out, env);
    if (command == "curate") return cmd_curate(rc, out);
    if (command == "review") return cmd_review(rc, in, out);
    if (command == "export") return cmd_export(rc, flags, out);
    if (command == "finetune") return cmd_finetune(rc, flags, out, err, env);
    if (command == "evaluate") return cmd_evaluate(rc, flags, out, env);
    if (command == "analyze") return cmd_analyze(rc, flags, out);
    if (command == "report") return cmd_report(rc, out);
    report_error(err, "usage", "unknown subcommand " + command);
    return 2;
  } catch (const ConfigError& e) {
    report_error(err, "config", e.what());
    return 2;
  } catch (const std::exception& e) {
    report_error(err, error_kind(e), e.what());
    return 1;
  }
}

}  // namespace agentft
