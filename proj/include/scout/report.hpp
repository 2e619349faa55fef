#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "scout/baselines.hpp"
#include "scout/context.hpp"
#include "scout/digest.hpp"
#include "scout/errors.hpp"
#include "scout/ledger.hpp"
#include "scout/orchestrator.hpp"

namespace scout {

namespace detail {

inline json attributions_json(const std::vector<Attribution>& attributions) {
  json arr = json::array();
  for (const auto& a : attributions) {
    arr.push_back(
        json{{"claim", a.claim}, {"domain_id", a.domain_id}, {"report_ids", a.report_ids}});
  }
  return arr;
}

inline json cost_json(const CostLedger& ledger) {
  LedgerTotals totals = ledger.totals();
  auto records = ledger.records();
  auto per_stage = stage_costs(records);

  json stages = json::object();
  for (Stage stage :
       {Stage::Relevance, Stage::Seeding, Stage::Refinement, Stage::Baseline}) {
    StageCost cost = per_stage.count(stage) ? per_stage[stage] : StageCost{};
    stages[to_string(stage)] = json{{"calls", cost.calls},
                                    {"tokens_in", cost.tokens_in},
                                    {"tokens_out", cost.tokens_out},
                                    {"wall_ms", cost.wall_ms},
                                    {"busy_ms", cost.busy_ms}};
  }
  json per_domain = json::object();
  for (const auto& [domain_id, calls] : totals.per_domain_calls) per_domain[domain_id] = calls;

  double wall_secs =
      static_cast<double>(ledger.clock().now_ms() - ledger.run_started_ms()) / 1000.0;
  return json{{"total_tokens_in", totals.total_tokens_in},
              {"total_tokens_out", totals.total_tokens_out},
              {"total_calls", totals.total_calls},
              {"failed_calls", totals.failed_calls},
              {"wall_seconds", wall_secs},
              {"per_stage", stages},
              {"per_domain", per_domain}};
}

}  // namespace detail

/// Machine-readable run report. Volatile wall-clock fields live only under
/// cost.wall_seconds and cost.per_stage.*.{wall_ms,busy_ms}; everything else
/// is deterministic for identical inputs and forms the fingerprinted section.
inline json build_run_report(const RunContext& ctx, const Query& query,
                             const ScoutRunResult& result) {
  json trace_rows = json::array();
  for (const auto& row : result.trace.iterations) {
    json gaps = json::array();
    for (const auto& gap : row.report.gaps) gaps.push_back(gap);
    json followups = json::array();
    for (const auto& followup : row.report.followups) followups.push_back(followup.text);
    trace_rows.push_back(json{{"iteration", row.answer.iteration},
                              {"q", row.q},
                              {"completeness", row.report.completeness},
                              {"breadth", row.report.breadth},
                              {"decision", to_string(row.decision)},
                              {"gaps", gaps},
                              {"followups", followups},
                              {"answer", row.answer.text}});
  }

  json report{{"query", json{{"id", query.id}, {"text", query.text}}},
              {"mode", to_string(ctx.config.mode)},
              {"status", to_string(result.status)},
              {"answer", result.best ? json(result.best->text) : json(nullptr)},
              {"attributions", result.best ? detail::attributions_json(result.best->attributions)
                                           : json::array()},
              {"best_iteration",
               result.best ? json(static_cast<std::int64_t>(result.trace.best_index))
                           : json(nullptr)},
              {"stop_reason", result.trace.iterations.empty()
                                  ? json(nullptr)
                                  : json(to_string(result.trace.stop_reason))},
              {"quality_trace", trace_rows},
              {"cost", detail::cost_json(ctx.ledger)},
              {"config_fingerprint", config_fingerprint(ctx.config)}};
  return report;
}

inline json build_baseline_report(const RunContext& ctx, const Query& query,
                                  const BaselineResult& result) {
  json report{{"query", json{{"id", query.id}, {"text", query.text}}},
              {"mode", to_string(ctx.config.mode)},
              {"status", to_string(result.status)},
              {"answer", result.status == RunStatus::Success ? json(result.answer)
                                                             : json(nullptr)},
              {"attributions", detail::attributions_json(result.attributions)},
              {"best_iteration", 0},
              {"stop_reason", "completed"},
              {"quality_trace", json::array()},
              {"cost", detail::cost_json(ctx.ledger)},
              {"config_fingerprint", config_fingerprint(ctx.config)}};
  return report;
}

/// The report minus its wall-clock fields; byte-identical across runs with
/// identical corpus bytes, script bytes, and config.
inline json fingerprinted_section(json report) {
  if (report.contains("cost")) {
    report["cost"].erase("wall_seconds");
    if (report["cost"].contains("per_stage")) {
      for (auto& [stage, cost] : report["cost"]["per_stage"].items()) {
        cost.erase("wall_ms");
        cost.erase("busy_ms");
      }
    }
  }
  return report;
}

/// Write via temp file + rename so readers never observe a partial report.
inline void write_report_atomic(const std::string& path, const json& report) {
  std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) raise(ErrorCode::IoError, "cannot write '" + tmp.string() + "'");
    out << report.dump(2) << '\n';
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    raise(ErrorCode::IoError, "cannot move report into place: " + ec.message());
  }
}

}  // namespace scout
