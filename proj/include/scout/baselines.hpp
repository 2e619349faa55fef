#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scout/context.hpp"
#include "scout/errors.hpp"
#include "scout/ledger.hpp"
#include "scout/orchestrator.hpp"
#include "scout/parallel.hpp"
#include "scout/refinement.hpp"
#include "scout/seeding.hpp"

namespace scout {

enum class BaselineMode { CentralLocal, CentralGlobal, DriftCentral, DriftDecentral };

inline BaselineMode baseline_mode_of(RunMode mode) {
  switch (mode) {
    case RunMode::CentralLocal: return BaselineMode::CentralLocal;
    case RunMode::CentralGlobal: return BaselineMode::CentralGlobal;
    case RunMode::DriftCentral: return BaselineMode::DriftCentral;
    case RunMode::DriftDecentral: return BaselineMode::DriftDecentral;
    case RunMode::Scout: break;
  }
  raise(ErrorCode::InvalidArgument, "not a baseline mode");
}

struct BaselineResult {
  RunStatus status = RunStatus::Success;
  std::string answer;
  std::vector<Attribution> attributions;
  std::size_t failed_retrievals = 0;
};

inline constexpr int kDriftRounds = 2;
inline constexpr int kDriftFollowupsPerRound = 3;

/// All reports pooled into one virtual domain, as if the corpus had been
/// consolidated into a single store. Report ids are prefixed with their home
/// domain so they stay unique; summaries are concatenated.
inline DomainProfile merged_domain(const DomainRegistry& registry) {
  DomainProfile merged;
  merged.id = "__central__";
  merged.name = "central";
  std::string summary;
  for (const auto& [id, profile] : registry.domains()) {
    if (!summary.empty()) summary += ' ';
    summary += profile.summary_text;
    for (const auto& report : profile.reports) {
      CommunityReport copy = report;
      copy.id = id + "/" + report.id;
      copy.domain_id = merged.id;
      merged.reports.push_back(std::move(copy));
    }
  }
  merged.summary_text = summary;
  return merged;
}

namespace detail {

/// Exactly kDriftFollowupsPerRound follow-up queries per round: the quality
/// assessor's suggestions first, padded with generic reformulations when it
/// supplies fewer.
inline std::vector<Query> drift_followups(RunContext& ctx, const Query& query,
                                          const std::string& current_text, int round) {
  std::vector<Query> followups;
  try {
    SynthesizedAnswer probe;
    probe.text = current_text;
    QualityReport report = assess_quality(ctx, probe, query, Stage::Baseline);
    for (const auto& f : report.followups) {
      if (static_cast<int>(followups.size()) >= kDriftFollowupsPerRound) break;
      followups.push_back(f);
    }
  } catch (const Error&) {
    // fall through to generic reformulations
  }
  int k = 0;
  while (static_cast<int>(followups.size()) < kDriftFollowupsPerRound) {
    followups.push_back(Query{query.id + "#r" + std::to_string(round) + "f" + std::to_string(k),
                              query.text + " (aspect " + std::to_string(round) + "." +
                                  std::to_string(k) + ")",
                              std::nullopt});
    ++k;
  }
  return followups;
}

/// DRIFT-style pipeline against one domain: one global search, then two
/// rounds of three follow-up local searches each, then one synthesis over
/// everything retrieved.
inline std::optional<PartialAnswer> drift_pipeline(RunContext& ctx, const Query& query,
                                                   const DomainProfile& domain,
                                                   std::size_t* failed) {
  std::vector<PartialAnswer> partials;
  try {
    partials.push_back(retrieve_global(ctx, query, domain, Stage::Baseline));
  } catch (const Error&) {
    if (failed) ++*failed;
  }

  auto joined_text = [&partials] {
    std::string text;
    for (const auto& partial : partials) {
      if (!text.empty()) text += '\n';
      text += partial.text;
    }
    return text.empty() ? std::string("(no evidence yet)") : text;
  };

  for (int round = 1; round <= kDriftRounds; ++round) {
    auto followups = drift_followups(ctx, query, joined_text(), round);
    for (const auto& followup : followups) {
      try {
        partials.push_back(retrieve_local(ctx, followup, domain, Stage::Baseline));
      } catch (const Error&) {
        if (failed) ++*failed;
      }
    }
  }

  if (partials.empty()) return std::nullopt;
  try {
    SynthesizedAnswer answer =
        run_synthesis(ctx, query, std::nullopt, partials, 0, Stage::Baseline);
    PartialAnswer out;
    out.domain_id = domain.id;
    out.mode = RetrievalMode::Global;
    out.text = answer.text;
    for (const auto& partial : partials) {
      for (const auto& rid : partial.source_report_ids) out.source_report_ids.push_back(rid);
    }
    return out;
  } catch (const Error&) {
    if (failed) ++*failed;
    return std::nullopt;
  }
}

inline BaselineResult single_shot(RunContext& ctx, const Query& query, RetrievalMode mode) {
  BaselineResult result;
  DomainProfile central = merged_domain(ctx.registry);
  try {
    PartialAnswer partial = retrieve_with_mode(ctx, query, central, mode, Stage::Baseline);
    result.answer = partial.text;
    result.attributions.push_back(Attribution{"", central.id, partial.source_report_ids});
  } catch (const Error& e) {
    result.status = e.code() == ErrorCode::BudgetExhausted
                        ? RunStatus::BudgetExhaustedBeforeSeed
                        : RunStatus::SynthesisFailed;
    result.failed_retrievals = 1;
  }
  return result;
}

}  // namespace detail

/// Reference policies sharing the ledger, budget gate, clock, and context
/// sizes with the tiered pipeline, so cost structures compare directly.
inline BaselineResult run_baseline(RunContext& ctx, BaselineMode mode, const Query& query) {
  if (ctx.registry.empty()) {
    raise(ErrorCode::InvalidArgument, "registry is empty");
  }

  switch (mode) {
    case BaselineMode::CentralLocal:
      return detail::single_shot(ctx, query, RetrievalMode::Local);
    case BaselineMode::CentralGlobal:
      return detail::single_shot(ctx, query, RetrievalMode::Global);

    case BaselineMode::DriftCentral: {
      BaselineResult result;
      DomainProfile central = merged_domain(ctx.registry);
      auto answer = detail::drift_pipeline(ctx, query, central, &result.failed_retrievals);
      if (!answer) {
        result.status = ctx.budget_gate_closed() ? RunStatus::BudgetExhaustedBeforeSeed
                                                 : RunStatus::SynthesisFailed;
        return result;
      }
      result.answer = answer->text;
      result.attributions.push_back(Attribution{"", central.id, answer->source_report_ids});
      return result;
    }

    case BaselineMode::DriftDecentral: {
      BaselineResult result;
      std::vector<const DomainProfile*> domains;
      for (const auto& [id, profile] : ctx.registry.domains()) domains.push_back(&profile);

      std::vector<std::optional<PartialAnswer>> slots(domains.size());
      std::vector<std::size_t> failures(domains.size(), 0);
      parallel_for(domains.size(), static_cast<std::size_t>(ctx.config.concurrency),
                   [&](std::size_t i) {
                     slots[i] = detail::drift_pipeline(ctx, query, *domains[i], &failures[i]);
                   });
      std::vector<PartialAnswer> domain_answers;
      for (auto& slot : slots) {
        if (slot) domain_answers.push_back(std::move(*slot));
      }
      for (std::size_t f : failures) result.failed_retrievals += f;

      if (domain_answers.empty()) {
        result.status = ctx.budget_gate_closed() ? RunStatus::BudgetExhaustedBeforeSeed
                                                 : RunStatus::SynthesisFailed;
        return result;
      }
      try {
        SynthesizedAnswer final_answer =
            run_synthesis(ctx, query, std::nullopt, domain_answers, 0, Stage::Baseline);
        result.answer = final_answer.text;
        result.attributions = final_answer.attributions;
      } catch (const Error& e) {
        result.status = e.code() == ErrorCode::BudgetExhausted
                            ? RunStatus::BudgetExhaustedBeforeSeed
                            : RunStatus::SynthesisFailed;
      }
      return result;
    }
  }
  raise(ErrorCode::InvalidArgument, "unknown baseline mode");
}

}  // namespace scout
