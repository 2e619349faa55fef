#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "scout/agents.hpp"
#include "scout/context.hpp"
#include "scout/errors.hpp"
#include "scout/ledger.hpp"
#include "scout/parallel.hpp"
#include "scout/quality.hpp"
#include "scout/relevance.hpp"
#include "scout/seeding.hpp"

namespace scout {

enum class StrategyDecision { Depth, Breadth, Hybrid, Stop };

inline const char* to_string(StrategyDecision decision) {
  switch (decision) {
    case StrategyDecision::Depth: return "depth";
    case StrategyDecision::Breadth: return "breadth";
    case StrategyDecision::Hybrid: return "hybrid";
    case StrategyDecision::Stop: return "stop";
  }
  return "?";
}

enum class StopReason { QualityThreshold, TimeDepleted, Stagnation, StrategyStop, IterationCap };

inline const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::QualityThreshold: return "quality-threshold";
    case StopReason::TimeDepleted: return "time-depleted";
    case StopReason::Stagnation: return "stagnation";
    case StopReason::StrategyStop: return "strategy-stop";
    case StopReason::IterationCap: return "iteration-cap";
  }
  return "?";
}

struct TraceIteration {
  SynthesizedAnswer answer;
  QualityReport report;
  StrategyDecision decision = StrategyDecision::Stop;
  double q = 0.0;  // overall_quality of the paired report
};

/// Full record of the refinement loop: one row per assessed answer (row 0 is
/// the seed), the index of the best row, and why the loop stopped.
struct RefinementTrace {
  std::vector<TraceIteration> iterations;
  std::size_t best_index = 0;
  StopReason stop_reason = StopReason::StrategyStop;
};

/// Argmax over recorded quality; earliest row wins ties, so a late round can
/// never displace an equally good earlier answer.
inline std::size_t best_answer_index(const std::vector<TraceIteration>& iterations) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < iterations.size(); ++i) {
    if (iterations[i].q > iterations[best].q) best = i;
  }
  return best;
}

/// Ask the quality assessor for the (completeness, breadth, gaps, follow-ups)
/// verdict on one answer. Scores are clamped into [0,1]; follow-ups are
/// deduplicated and capped; if the assessor reports gaps without follow-ups,
/// one follow-up per gap is derived so gaps are always actionable.
inline QualityReport assess_quality(RunContext& ctx, const SynthesizedAnswer& answer,
                                    const Query& query, Stage stage = Stage::Refinement) {
  if (trim_copy(answer.text).empty()) {
    raise(ErrorCode::InvalidArgument, "cannot assess an empty answer");
  }
  auto started_at = ctx.ledger.try_begin();
  if (!started_at) {
    raise(ErrorCode::BudgetExhausted, "budget gate closed before quality assessment");
  }

  json payload = make_quality_payload(query.text, answer.text);
  CallRecord record;
  record.stage = stage;
  record.role = AgentRole::QualityAssessor;
  record.started_at_ms = *started_at;

  AgentResponse response;
  try {
    response = ctx.backend.invoke(make_request(AgentRole::QualityAssessor, payload));
  } catch (const Error& e) {
    record.outcome = CallOutcome::Failed;
    record.failure_reason = e.what();
    ctx.ledger.append(std::move(record));
    raise(ErrorCode::AssessmentFailed, e.what());
  }

  record.tokens_in = response.usage.tokens_in;
  record.tokens_out = response.usage.tokens_out;
  ctx.ledger.append(std::move(record));

  QualityReport report;
  report.completeness = std::clamp(response.body["completeness"].get<double>(), 0.0, 1.0);
  report.breadth = std::clamp(response.body["breadth"].get<double>(), 0.0, 1.0);
  if (response.body.contains("gaps")) {
    for (const auto& gap : response.body["gaps"]) {
      std::string text = trim_copy(gap.get<std::string>());
      if (!text.empty()) report.gaps.push_back(std::move(text));
    }
  }

  std::vector<std::string> followup_texts;
  if (response.body.contains("followups")) {
    for (const auto& f : response.body["followups"]) {
      std::string text = trim_copy(f.get<std::string>());
      if (!text.empty()) followup_texts.push_back(std::move(text));
    }
  }
  if (followup_texts.empty() && report.completeness < 1.0 && !report.gaps.empty()) {
    for (const auto& gap : report.gaps) followup_texts.push_back("Address gap: " + gap);
  }
  std::set<std::string> seen;
  int counter = 0;
  for (auto& text : followup_texts) {
    if (!seen.insert(text).second) continue;
    if (static_cast<int>(report.followups.size()) >= ctx.config.followup_cap) break;
    report.followups.push_back(
        Query{query.id + "#f" + std::to_string(counter++), text, std::nullopt});
  }
  return report;
}

/// Refinement-mode decision table, evaluated most-specific-first so the
/// combined branch is reachable: Hybrid when the answer is both incomplete
/// and narrow with time to run both legs, else Depth, else Breadth, else
/// Stop. All cutoffs are strict comparisons.
inline StrategyDecision select_strategy(const QualityReport& report, double remaining_secs,
                                        const StrategyThresholds& t = {}) {
  bool incomplete = report.completeness < t.depth_completeness;
  bool narrow = report.breadth < t.breadth_coverage;
  if (incomplete && narrow && remaining_secs > t.hybrid_min_secs) return StrategyDecision::Hybrid;
  if (incomplete && remaining_secs > t.depth_min_secs) return StrategyDecision::Depth;
  if (narrow && remaining_secs > t.breadth_min_secs) return StrategyDecision::Breadth;
  return StrategyDecision::Stop;
}

/// Termination rules, checked in order: quality threshold reached, time
/// budget nearly depleted, improvement stagnated, iteration cap reached.
inline std::optional<StopReason> should_terminate(const RefinementTrace& trace,
                                                  double remaining_secs, double epsilon,
                                                  double quality_threshold = 0.85,
                                                  double time_floor_secs = 5.0,
                                                  int iteration_cap = 5) {
  if (trace.iterations.empty()) return std::nullopt;
  if (trace.iterations.back().q >= quality_threshold) return StopReason::QualityThreshold;
  if (remaining_secs < time_floor_secs) return StopReason::TimeDepleted;
  if (trace.iterations.size() >= 2) {
    double delta = trace.iterations.back().q - trace.iterations[trace.iterations.size() - 2].q;
    if (delta < epsilon) return StopReason::Stagnation;
  }
  if (static_cast<int>(trace.iterations.size()) - 1 >= iteration_cap) {
    return StopReason::IterationCap;
  }
  return std::nullopt;
}

/// Execute one refinement round. Depth sends every follow-up query into
/// every HIGH domain; Breadth sends the original query into every still-
/// deferred POTENTIAL domain and activates it (removes it from the pool);
/// Hybrid runs both legs concurrently. All calls are local-mode. Throws
/// NoTargets when the selected legs have no domains left.
inline std::vector<PartialAnswer> execute_refinement(
    RunContext& ctx, StrategyDecision decision, const std::vector<Query>& followups,
    const std::vector<std::string>& high_ids, std::vector<std::string>& potential_pool,
    const Query& original_query) {
  if (decision == StrategyDecision::Stop) {
    raise(ErrorCode::InvalidArgument, "execute_refinement called with Stop");
  }
  bool depth_leg = decision == StrategyDecision::Depth || decision == StrategyDecision::Hybrid;
  bool breadth_leg = decision == StrategyDecision::Breadth || decision == StrategyDecision::Hybrid;

  if (decision == StrategyDecision::Depth && high_ids.empty()) {
    raise(ErrorCode::NoTargets, "depth refinement with no HIGH domains");
  }
  if (decision == StrategyDecision::Breadth && potential_pool.empty()) {
    raise(ErrorCode::NoTargets, "breadth refinement with no POTENTIAL domains left");
  }
  if (decision == StrategyDecision::Hybrid && high_ids.empty() && potential_pool.empty()) {
    raise(ErrorCode::NoTargets, "hybrid refinement with no targets");
  }

  struct Task {
    const Query* query;
    std::string domain_id;
  };
  std::vector<Task> tasks;
  if (depth_leg) {
    for (const auto& followup : followups) {
      for (const auto& domain_id : high_ids) tasks.push_back(Task{&followup, domain_id});
    }
  }
  std::vector<std::string> activated;
  if (breadth_leg) {
    for (const auto& domain_id : potential_pool) {
      tasks.push_back(Task{&original_query, domain_id});
      activated.push_back(domain_id);
    }
  }

  std::vector<std::optional<PartialAnswer>> slots(tasks.size());
  parallel_for(tasks.size(), static_cast<std::size_t>(ctx.config.concurrency),
               [&](std::size_t i) {
                 try {
                   slots[i] = retrieve_local(ctx, *tasks[i].query,
                                             ctx.registry.domain(tasks[i].domain_id),
                                             Stage::Refinement);
                 } catch (const Error&) {
                   // Contained: the failure is already in the ledger.
                 } catch (const std::exception&) {
                 }
               });

  // Activation is permanent even if the activating call failed; a domain is
  // activated at most once per query.
  if (!activated.empty()) {
    std::erase_if(potential_pool, [&](const std::string& id) {
      return std::find(activated.begin(), activated.end(), id) != activated.end();
    });
  }

  std::vector<PartialAnswer> partials;
  for (auto& slot : slots) {
    if (slot) partials.push_back(std::move(*slot));
  }
  return partials;
}

/// Merge new evidence into the current answer. Empty evidence (or a failed
/// synthesis) keeps the current answer unchanged, and the unchanged quality
/// then trips the stagnation rule on the next check. Real fusion advances
/// the iteration counter and accumulates attributions.
inline SynthesizedAnswer fuse(RunContext& ctx, const SynthesizedAnswer& current,
                              const std::vector<PartialAnswer>& new_partials,
                              const Query& query) {
  if (new_partials.empty()) return current;

  std::set<std::string> carryover;
  for (const auto& attribution : current.attributions) carryover.insert(attribution.domain_id);

  SynthesizedAnswer fused;
  try {
    fused = run_synthesis(ctx, query, current.text, new_partials, current.iteration + 1,
                          Stage::Refinement, carryover);
  } catch (const Error&) {
    return current;  // retain the current answer; the round counts as no-improvement
  }

  // Accumulate: prior attributions first, then the new round's.
  std::vector<Attribution> merged = current.attributions;
  for (auto& attribution : fused.attributions) merged.push_back(std::move(attribution));
  fused.attributions = std::move(merged);
  return fused;
}

/// The refinement loop: assess, check termination, pick a strategy, retrieve,
/// fuse, re-assess — all on the run clock and through the budget gate. Every
/// failure path degrades to a stop with the best answer so far; the returned
/// best row is the argmax over recorded quality with earliest-tie preference.
inline RefinementTrace run_refinement_loop(RunContext& ctx, const SynthesizedAnswer& seed,
                                           const Query& query,
                                           const std::vector<RelevanceAssessment>& assessments) {
  std::vector<std::string> high_ids;
  std::vector<std::string> potential_pool;
  for (const auto& assessment : assessments) {
    if (assessment.tier == RelevanceTier::High) high_ids.push_back(assessment.domain_id);
    if (assessment.tier == RelevanceTier::Potential) {
      potential_pool.push_back(assessment.domain_id);
    }
  }

  RefinementTrace trace;
  auto push_row = [&trace](SynthesizedAnswer answer, QualityReport report) {
    double q = overall_quality(report);
    answer.quality = report;
    trace.iterations.push_back(
        TraceIteration{std::move(answer), std::move(report), StrategyDecision::Stop, q});
  };
  auto stop_reason_for = [&ctx](const Error& e) {
    // A blocked gate with wall-clock time gone is a time stop; everything
    // else (token exhaustion, assessor failure) is a conservative strategy
    // stop: never refine blind.
    if (e.code() == ErrorCode::BudgetExhausted &&
        ctx.remaining_secs() < ctx.ledger.reserve_secs()) {
      return StopReason::TimeDepleted;
    }
    return StopReason::StrategyStop;
  };

  SynthesizedAnswer current = seed;
  try {
    push_row(current, assess_quality(ctx, current, query));
  } catch (const Error& e) {
    push_row(current, QualityReport{});
    trace.stop_reason = stop_reason_for(e);
    trace.best_index = 0;
    return trace;
  }

  while (true) {
    double remaining = ctx.remaining_secs();
    if (auto reason = should_terminate(trace, remaining, ctx.config.epsilon,
                                       ctx.config.quality_threshold,
                                       ctx.config.time_reserve_secs, ctx.config.iteration_cap)) {
      trace.stop_reason = *reason;
      break;
    }

    StrategyDecision decision =
        select_strategy(trace.iterations.back().report, remaining, ctx.config.thresholds);
    trace.iterations.back().decision = decision;
    if (decision == StrategyDecision::Stop) {
      trace.stop_reason = StopReason::StrategyStop;
      break;
    }

    std::vector<PartialAnswer> partials;
    try {
      partials = execute_refinement(ctx, decision, trace.iterations.back().report.followups,
                                    high_ids, potential_pool, query);
    } catch (const Error& e) {
      trace.stop_reason =
          e.code() == ErrorCode::NoTargets ? StopReason::StrategyStop : stop_reason_for(e);
      break;
    }

    current = fuse(ctx, current, partials, query);

    try {
      push_row(current, assess_quality(ctx, current, query));
    } catch (const Error& e) {
      push_row(current, QualityReport{});
      trace.stop_reason = stop_reason_for(e);
      break;
    }
  }

  trace.best_index = best_answer_index(trace.iterations);
  return trace;
}

}  // namespace scout
