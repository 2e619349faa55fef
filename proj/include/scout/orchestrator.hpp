#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "scout/context.hpp"
#include "scout/errors.hpp"
#include "scout/refinement.hpp"
#include "scout/relevance.hpp"
#include "scout/seeding.hpp"

namespace scout {

enum class RunStatus { Success, NoRelevantDomain, SynthesisFailed, BudgetExhaustedBeforeSeed };

inline const char* to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Success: return "success";
    case RunStatus::NoRelevantDomain: return "no-relevant-domain";
    case RunStatus::SynthesisFailed: return "synthesis-failed";
    case RunStatus::BudgetExhaustedBeforeSeed: return "budget-exhausted-before-seed";
  }
  return "?";
}

struct ScoutRunResult {
  RunStatus status = RunStatus::Success;
  std::vector<RelevanceAssessment> assessments;
  SeedingPlan plan;
  std::vector<RetrievalFailure> seeding_failures;
  RefinementTrace trace;
  std::optional<SynthesizedAnswer> best;
  std::vector<std::string> contributing_domains;
};

/// End-to-end tiered run: rank all domains, seed from the relevant tiers,
/// then refine under the remaining budget. Returns the best-tracked answer;
/// after the seed exists, no failure is fatal.
inline ScoutRunResult run_scout(RunContext& ctx, const Query& query) {
  ScoutRunResult result;

  result.assessments = rank_domains(ctx, query);
  result.plan = plan_seeding(result.assessments);

  if (result.plan.entries.empty()) {
    result.status = ctx.budget_gate_closed() ? RunStatus::BudgetExhaustedBeforeSeed
                                             : RunStatus::NoRelevantDomain;
    return result;
  }

  SeedingOutcome seeding = execute_seeding(ctx, result.plan, query);
  result.seeding_failures = seeding.failures;
  if (seeding.partials.empty()) {
    result.status = ctx.budget_gate_closed() ? RunStatus::BudgetExhaustedBeforeSeed
                                             : RunStatus::SynthesisFailed;
    return result;
  }

  SynthesizedAnswer seed;
  try {
    seed = synthesize_seed(ctx, query, seeding.partials);
  } catch (const Error& e) {
    result.status = e.code() == ErrorCode::BudgetExhausted
                        ? RunStatus::BudgetExhaustedBeforeSeed
                        : RunStatus::SynthesisFailed;
    return result;
  }

  result.trace = run_refinement_loop(ctx, seed, query, result.assessments);
  result.best = result.trace.iterations[result.trace.best_index].answer;

  std::set<std::string> domains;
  for (const auto& attribution : result.best->attributions) domains.insert(attribution.domain_id);
  result.contributing_domains.assign(domains.begin(), domains.end());
  return result;
}

/// Record the final quality of the returned answer against every domain that
/// contributed attributions to it. Called between queries, single writer.
inline void apply_history_update(DomainRegistry& registry, const ScoutRunResult& result) {
  if (!result.best || result.trace.iterations.empty()) return;
  double q = result.trace.iterations[result.trace.best_index].q;
  for (const auto& domain_id : result.contributing_domains) {
    if (registry.contains(domain_id)) registry.record_quality(domain_id, q);
  }
}

}  // namespace scout
