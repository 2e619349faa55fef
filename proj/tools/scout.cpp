// Command-line front end: ingest corpora, run one query in any mode, or
// compare modes across a query set against the same scripted backend.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scout/scout.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitNoRelevantDomain = 3;
constexpr int kExitSynthesisFailed = 4;
constexpr int kExitBudgetExhausted = 5;

int exit_code_for(scout::RunStatus status) {
  switch (status) {
    case scout::RunStatus::Success: return kExitOk;
    case scout::RunStatus::NoRelevantDomain: return kExitNoRelevantDomain;
    case scout::RunStatus::SynthesisFailed: return kExitSynthesisFailed;
    case scout::RunStatus::BudgetExhaustedBeforeSeed: return kExitBudgetExhausted;
  }
  return kExitUsage;
}

int exit_code_for(const scout::Error& e) {
  switch (e.code()) {
    case scout::ErrorCode::IoError:
    case scout::ErrorCode::ParseError:
    case scout::ErrorCode::DuplicateReportId:
    case scout::ErrorCode::DuplicateDomainId:
    case scout::ErrorCode::DuplicateEntry:
    case scout::ErrorCode::EmptyDomain:
    case scout::ErrorCode::MalformedEmbedding:
      return kExitIo;
    case scout::ErrorCode::NoRelevantDomain:
      return kExitNoRelevantDomain;
    case scout::ErrorCode::SynthesisFailed:
      return kExitSynthesisFailed;
    case scout::ErrorCode::BudgetExhausted:
      return kExitBudgetExhausted;
    default:
      return kExitUsage;
  }
}

// All raw flag values; only flags the user actually passed override the
// config file, so precedence is defaults < --config < flags.
struct Flags {
  std::string config_file;
  std::string corpus;
  std::string domains;
  std::string mode = "scout";
  std::string backend = "scripted";
  std::string script;
  std::string endpoint;
  std::string model;
  std::string prompts_file;
  double budget_secs = 300.0;
  std::int64_t token_budget = 2'000'000;
  double epsilon = 0.01;
  int iteration_cap = 5;
  int k = 8;
  int k_local = 3;
  int concurrency = 8;
  std::uint64_t seed = 0;
  std::string out;
  bool sim_clock = false;
};

void add_common_flags(CLI::App* cmd, Flags& flags) {
  cmd->add_option("--config", flags.config_file, "JSON config file; flags override it");
  cmd->add_option("--corpus", flags.corpus, "newline-delimited report records");
  cmd->add_option("--domains", flags.domains,
                  "domain sidecar file (default: <corpus stem>.domains.jsonl if present)");
  cmd->add_option("--mode", flags.mode,
                  "scout | central-local | central-global | drift-central | drift-decentral");
  cmd->add_option("--backend", flags.backend, "scripted | http");
  cmd->add_option("--script", flags.script, "script file for the scripted backend");
  cmd->add_option("--endpoint", flags.endpoint, "chat-completion URL for the http backend");
  cmd->add_option("--model", flags.model, "model name for the http backend");
  cmd->add_option("--prompts", flags.prompts_file,
                  "JSON file of per-role system prompt overrides (http backend)");
  cmd->add_option("--budget-secs", flags.budget_secs, "wall-clock budget in seconds");
  cmd->add_option("--token-budget", flags.token_budget, "total token budget");
  cmd->add_option("--epsilon", flags.epsilon, "stagnation threshold on quality improvement");
  cmd->add_option("--iteration-cap", flags.iteration_cap, "max refinement rounds");
  cmd->add_option("--k", flags.k, "global retrieval context size");
  cmd->add_option("--k-local", flags.k_local, "local retrieval context size");
  cmd->add_option("--concurrency", flags.concurrency, "max in-flight agent calls");
  cmd->add_option("--seed", flags.seed, "seed for randomized tie fallbacks (reserved)");
  cmd->add_option("--out", flags.out, "write the run report here (atomically)");
  cmd->add_flag("--sim-clock", flags.sim_clock, "run on a simulated clock");
}

scout::RunConfig build_config(const CLI::App* cmd, const Flags& flags) {
  scout::RunConfig config;
  if (!flags.config_file.empty()) {
    std::ifstream in(flags.config_file);
    if (!in) scout::raise(scout::ErrorCode::IoError, "cannot open '" + flags.config_file + "'");
    scout::json doc;
    try {
      in >> doc;
    } catch (const scout::json::exception& e) {
      scout::raise(scout::ErrorCode::ParseError, flags.config_file + ": " + e.what());
    }
    config = scout::config_from_json(doc, config);
  }
  auto set = [&](const char* name) { return cmd->count(name) > 0; };
  if (set("--corpus")) config.corpus_path = flags.corpus;
  if (set("--domains")) config.domains_path = flags.domains;
  if (set("--mode")) config.mode = scout::parse_run_mode(flags.mode);
  if (set("--backend")) config.backend = scout::parse_backend_kind(flags.backend);
  if (set("--script")) config.script_path = flags.script;
  if (set("--endpoint")) config.endpoint = flags.endpoint;
  if (set("--model")) config.model = flags.model;
  if (set("--budget-secs")) config.budget.max_time_secs = flags.budget_secs;
  if (set("--token-budget")) config.budget.max_tokens = flags.token_budget;
  if (set("--epsilon")) config.epsilon = flags.epsilon;
  if (set("--iteration-cap")) config.iteration_cap = flags.iteration_cap;
  if (set("--k")) config.k_global = flags.k;
  if (set("--k-local")) config.k_local = flags.k_local;
  if (set("--concurrency")) config.concurrency = flags.concurrency;
  if (set("--seed")) config.seed = flags.seed;
  if (set("--out")) config.output_path = flags.out;
  if (set("--sim-clock")) config.simulated_clock = flags.sim_clock;
  scout::validate_config(config);
  return config;
}

scout::DomainRegistry load_registry(const scout::RunConfig& config) {
  if (config.corpus_path.empty()) {
    scout::raise(scout::ErrorCode::InvalidArgument, "--corpus is required");
  }
  auto reports = scout::load_corpus_file(config.corpus_path);
  std::vector<scout::DomainRecord> domains;
  std::string sidecar = config.domains_path;
  if (sidecar.empty()) {
    std::filesystem::path p(config.corpus_path);
    p.replace_extension();
    p += ".domains.jsonl";
    if (std::filesystem::exists(p)) sidecar = p.string();
  }
  if (!sidecar.empty()) domains = scout::load_domain_file(sidecar);
  return scout::validate_corpus(reports, domains);
}

struct Runtime {
  std::unique_ptr<scout::Clock> clock;
  std::unique_ptr<scout::AgentBackend> backend;
};

Runtime build_runtime(const scout::RunConfig& config, const std::string& prompts_file) {
  Runtime rt;
  if (config.simulated_clock) {
    rt.clock = std::make_unique<scout::SimulatedClock>();
  } else {
    rt.clock = std::make_unique<scout::SystemClock>();
  }
  if (config.backend == scout::BackendKind::Scripted) {
    if (config.script_path.empty()) {
      scout::raise(scout::ErrorCode::InvalidArgument,
                   "--script is required for the scripted backend");
    }
    rt.backend = scout::load_script(config.script_path, rt.clock.get());
  } else {
    scout::HttpBackendConfig http;
    http.endpoint = config.endpoint;
    http.model = config.model;
    http.api_key_env = config.api_key_env;
    http.max_attempts = config.http_max_attempts;
    http.backoff_ms = config.http_backoff_ms;
    http.max_in_flight = config.concurrency;
    if (!prompts_file.empty()) {
      std::ifstream in(prompts_file);
      if (!in) scout::raise(scout::ErrorCode::IoError, "cannot open '" + prompts_file + "'");
      scout::json doc;
      try {
        in >> doc;
      } catch (const scout::json::exception& e) {
        scout::raise(scout::ErrorCode::ParseError, prompts_file + ": " + e.what());
      }
      for (auto& [role, prompt] : doc.items()) {
        http.prompts[scout::parse_agent_role(role)] = prompt.get<std::string>();
      }
    }
    rt.backend = std::make_unique<scout::HttpBackend>(http, rt.clock.get());
  }
  return rt;
}

struct SingleRun {
  scout::RunStatus status = scout::RunStatus::Success;
  scout::json report;
};

SingleRun run_one_query(const scout::RunConfig& config, scout::DomainRegistry& registry,
                        scout::AgentBackend& backend, scout::Clock& clock,
                        const scout::Query& query, bool update_history) {
  scout::CostLedger ledger(clock, config.budget, config.time_reserve_secs);
  scout::RunContext ctx{registry, backend, ledger, clock, config};
  SingleRun out;
  if (config.mode == scout::RunMode::Scout) {
    scout::ScoutRunResult result = scout::run_scout(ctx, query);
    out.status = result.status;
    out.report = scout::build_run_report(ctx, query, result);
    if (update_history) scout::apply_history_update(registry, result);
  } else {
    scout::BaselineResult result =
        scout::run_baseline(ctx, scout::baseline_mode_of(config.mode), query);
    out.status = result.status;
    out.report = scout::build_baseline_report(ctx, query, result);
  }
  return out;
}

int cmd_ingest(const CLI::App* cmd, const Flags& flags) {
  scout::RunConfig config = build_config(cmd, flags);
  scout::DomainRegistry registry = load_registry(config);
  std::cout << registry.size() << " domains, reports " << registry.min_report_count() << "-"
            << registry.max_report_count() << "\n";
  return kExitOk;
}

int cmd_run(const CLI::App* cmd, const Flags& flags, const std::string& query_text,
            const std::string& query_id) {
  scout::RunConfig config = build_config(cmd, flags);
  scout::DomainRegistry registry = load_registry(config);
  Runtime rt = build_runtime(config, flags.prompts_file);
  scout::Query query = scout::make_query(query_id, query_text);

  SingleRun run = run_one_query(config, registry, *rt.backend, *rt.clock, query, false);
  if (!config.output_path.empty()) {
    scout::write_report_atomic(config.output_path, run.report);
  }

  const scout::json& report = run.report;
  if (report["answer"].is_string()) {
    std::cout << report["answer"].get<std::string>() << "\n";
  }
  std::cout << "status=" << report["status"].get<std::string>();
  if (!report["best_iteration"].is_null()) {
    std::cout << " best_iteration=" << report["best_iteration"].get<std::int64_t>();
  }
  if (report["stop_reason"].is_string()) {
    std::cout << " stop=" << report["stop_reason"].get<std::string>();
  }
  if (!report["quality_trace"].empty()) {
    std::cout << " Q=" << report["quality_trace"].back()["q"].get<double>()
              << " best_Q="
              << report["quality_trace"][report["best_iteration"].get<std::size_t>()]["q"]
                     .get<double>();
  }
  const scout::json& cost = report["cost"];
  std::cout << " calls=" << cost["total_calls"].get<std::int64_t>()
            << " tokens=" << cost["total_tokens_in"].get<std::int64_t>() << "/"
            << cost["total_tokens_out"].get<std::int64_t>()
            << " wall=" << cost["wall_seconds"].get<double>() << "s\n";
  return exit_code_for(run.status);
}

struct QueryRecord {
  std::string id;
  std::string text;
  int level = 1;
};

std::vector<QueryRecord> load_queries(const std::string& path) {
  std::ifstream in(path);
  if (!in) scout::raise(scout::ErrorCode::IoError, "cannot open '" + path + "'");
  std::vector<QueryRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (scout::trim_copy(line).empty()) continue;
    scout::json obj;
    try {
      obj = scout::json::parse(line);
    } catch (const scout::json::exception& e) {
      scout::raise(scout::ErrorCode::ParseError,
                   path + " line " + std::to_string(line_no) + ": " + e.what());
    }
    QueryRecord rec;
    rec.text = obj.value("text", std::string{});
    if (rec.text.empty()) {
      scout::raise(scout::ErrorCode::ParseError,
                   path + " line " + std::to_string(line_no) + ": missing 'text'");
    }
    rec.id = obj.value("id", "q" + std::to_string(line_no));
    rec.level = obj.value("level", 1);
    out.push_back(std::move(rec));
  }
  return out;
}

int cmd_compare(const CLI::App* cmd, Flags& flags, const std::string& queries_path,
                const std::vector<std::string>& mode_args) {
  std::vector<std::string> modes = mode_args;
  if (modes.empty() && cmd->count("--mode") > 0) modes = {flags.mode};
  if (modes.empty()) modes = {"scout", "drift-decentral"};
  auto queries = load_queries(queries_path);
  if (queries.empty()) {
    scout::raise(scout::ErrorCode::InvalidArgument, "queries file is empty");
  }

  // level -> mode -> accumulated metrics
  std::map<int, std::map<std::string, scout::json>> table;
  scout::json runs = scout::json::array();

  for (const auto& mode_name : modes) {
    flags.mode = mode_name;
    scout::RunConfig config = build_config(cmd, flags);
    config.mode = scout::parse_run_mode(mode_name);
    scout::DomainRegistry registry = load_registry(config);
    Runtime rt = build_runtime(config, flags.prompts_file);

    for (const auto& record : queries) {
      scout::Query query = scout::make_query(record.id, record.text);
      bool failed = false;
      scout::json report;
      try {
        SingleRun run = run_one_query(config, registry, *rt.backend, *rt.clock, query,
                                      config.mode == scout::RunMode::Scout);
        report = run.report;
        failed = run.status != scout::RunStatus::Success;
      } catch (const scout::Error& e) {
        failed = true;
        report = scout::json{{"status", "error"}, {"error", e.what()}};
      }

      auto& cell = table[record.level][mode_name];
      if (cell.is_null()) {
        cell = scout::json{{"queries", 0}, {"failures", 0},     {"wall_seconds_sum", 0.0},
                           {"tokens_sum", 0}, {"calls_sum", 0}};
      }
      cell["queries"] = cell["queries"].get<int>() + 1;
      if (failed) cell["failures"] = cell["failures"].get<int>() + 1;
      if (report.contains("cost")) {
        const scout::json& cost = report["cost"];
        cell["wall_seconds_sum"] =
            cell["wall_seconds_sum"].get<double>() + cost["wall_seconds"].get<double>();
        cell["tokens_sum"] = cell["tokens_sum"].get<std::int64_t>() +
                             cost["total_tokens_in"].get<std::int64_t>() +
                             cost["total_tokens_out"].get<std::int64_t>();
        cell["calls_sum"] =
            cell["calls_sum"].get<std::int64_t>() + cost["total_calls"].get<std::int64_t>();
      }
      runs.push_back(scout::json{{"query_id", record.id},
                                 {"level", record.level},
                                 {"mode", mode_name},
                                 {"failed", failed},
                                 {"report", report}});
    }
  }

  scout::json levels = scout::json::array();
  std::printf("%-6s %-16s %8s %8s %12s %10s %9s\n", "level", "mode", "queries", "failures",
              "mean_wall_s", "mean_tok", "mean_calls");
  for (auto& [level, row] : table) {
    scout::json level_row{{"level", level}, {"modes", scout::json::object()}};
    for (auto& [mode_name, cell] : row) {
      int n = cell["queries"].get<int>();
      double mean_wall = cell["wall_seconds_sum"].get<double>() / n;
      double mean_tokens = static_cast<double>(cell["tokens_sum"].get<std::int64_t>()) / n;
      double mean_calls = static_cast<double>(cell["calls_sum"].get<std::int64_t>()) / n;
      level_row["modes"][mode_name] = scout::json{{"queries", n},
                                                  {"failures", cell["failures"]},
                                                  {"mean_wall_seconds", mean_wall},
                                                  {"mean_tokens", mean_tokens},
                                                  {"mean_calls", mean_calls}};
      std::printf("%-6d %-16s %8d %8d %12.3f %10.1f %9.1f\n", level, mode_name.c_str(), n,
                  cell["failures"].get<int>(), mean_wall, mean_tokens, mean_calls);
    }
    levels.push_back(std::move(level_row));
  }

  if (!flags.out.empty()) {
    scout::write_report_atomic(flags.out,
                               scout::json{{"levels", levels}, {"runs", runs}});
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tiered cross-domain retrieval orchestrator"};
  app.require_subcommand(1);

  Flags flags;
  std::string query_text;
  std::string query_id = "q0";
  std::string queries_path;
  std::vector<std::string> compare_modes;

  CLI::App* ingest = app.add_subcommand("ingest", "validate a corpus and print its shape");
  add_common_flags(ingest, flags);

  CLI::App* run = app.add_subcommand("run", "answer one query");
  run->add_option("query", query_text, "the natural-language query")->required();
  run->add_option("--query-id", query_id, "identifier recorded in the report");
  add_common_flags(run, flags);

  CLI::App* compare = app.add_subcommand("compare", "run a query set under several modes");
  compare->add_option("--queries", queries_path, "newline-delimited query records")->required();
  compare->add_option("--compare-mode", compare_modes,
                      "modes to compare (repeatable; default scout,drift-decentral)");
  add_common_flags(compare, flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(ingest)) return cmd_ingest(ingest, flags);
    if (app.got_subcommand(run)) return cmd_run(run, flags, query_text, query_id);
    if (app.got_subcommand(compare)) return cmd_compare(compare, flags, queries_path,
                                                        compare_modes);
  } catch (const scout::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
