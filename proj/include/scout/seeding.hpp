#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "scout/agents.hpp"
#include "scout/context.hpp"
#include "scout/core.hpp"
#include "scout/errors.hpp"
#include "scout/ledger.hpp"
#include "scout/parallel.hpp"
#include "scout/quality.hpp"
#include "scout/relevance.hpp"

namespace scout {

/// Tiered retrieval plan: HIGH domains get global retrieval, MODERATE get
/// local, POTENTIAL are deferred for later activation, IRRELEVANT are
/// excluded outright. The four buckets partition the registry.
struct SeedingPlan {
  std::vector<std::pair<std::string, RetrievalMode>> entries;
  std::vector<std::string> deferred;
  std::vector<std::string> excluded;
};

struct CallCost {
  std::int64_t tokens_in = 0;
  std::int64_t tokens_out = 0;
  std::int64_t elapsed_ms = 0;
};

struct PartialAnswer {
  std::string domain_id;
  RetrievalMode mode = RetrievalMode::Global;
  std::string text;
  std::vector<std::string> source_report_ids;
  CallCost cost;
};

struct Attribution {
  std::string claim;
  std::string domain_id;
  std::vector<std::string> report_ids;

  bool operator==(const Attribution&) const = default;
};

struct SynthesizedAnswer {
  std::string text;
  std::vector<Attribution> attributions;
  int iteration = 0;  // 0 is the seed; advances only on real fusion
  std::optional<QualityReport> quality;
};

inline SeedingPlan plan_seeding(const std::vector<RelevanceAssessment>& assessments) {
  SeedingPlan plan;
  for (const auto& assessment : assessments) {
    switch (assessment.tier) {
      case RelevanceTier::High:
        plan.entries.emplace_back(assessment.domain_id, RetrievalMode::Global);
        break;
      case RelevanceTier::Moderate:
        plan.entries.emplace_back(assessment.domain_id, RetrievalMode::Local);
        break;
      case RelevanceTier::Potential:
        plan.deferred.push_back(assessment.domain_id);
        break;
      case RelevanceTier::Irrelevant:
        plan.excluded.push_back(assessment.domain_id);
        break;
    }
  }
  return plan;
}

/// Top-k reports of the domain ranked by embedding similarity to the query;
/// similarity ties go to the lower report id. Corpus embeddings are used
/// only when the query carries one, keeping both sides in one space.
inline std::vector<const CommunityReport*> select_context_reports(const Query& query,
                                                                  const DomainProfile& domain,
                                                                  int k) {
  bool use_corpus_embeddings = query.embedding.has_value();
  Embedding q = query_embedding(query);
  std::vector<std::pair<double, const CommunityReport*>> scored;
  scored.reserve(domain.reports.size());
  for (const auto& report : domain.reports) {
    Embedding e = (use_corpus_embeddings && report.embedding)
                      ? *report.embedding
                      : fallback_embedding(report.title + " " + report.text);
    scored.emplace_back(similarity01(q, e), &report);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second->id < b.second->id;
  });
  std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(std::max(k, 0)),
                                           scored.size());
  std::vector<const CommunityReport*> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(scored[i].second);
  return out;
}

namespace detail {

inline json context_reports_json(const DomainProfile& domain,
                                 const std::vector<const CommunityReport*>& reports,
                                 bool include_summary) {
  json arr = json::array();
  if (include_summary) {
    arr.push_back(json{{"id", ""},
                       {"title", domain.name + " (domain summary)"},
                       {"text", domain.summary_text}});
  }
  for (const auto* report : reports) {
    arr.push_back(json{{"id", report->id}, {"title", report->title}, {"text", report->text}});
  }
  return arr;
}

}  // namespace detail

/// One retrieval call against one domain. Global mode sends the domain
/// summary plus the top-k reports; local mode sends only the top-k' reports.
/// The domain's simulated transit latency is paid up front on the run clock
/// and its token overhead is charged on the input side. Throws on failure;
/// failed calls (after admission) are recorded in the ledger.
inline PartialAnswer retrieve_with_mode(RunContext& ctx, const Query& query,
                                        const DomainProfile& domain, RetrievalMode mode,
                                        Stage stage) {
  auto started_at = ctx.ledger.try_begin();
  if (!started_at) {
    raise(ErrorCode::BudgetExhausted,
          "budget gate closed before retrieval on '" + domain.id + "'");
  }

  if (domain.cost_model.latency_ms > 0) {
    ctx.clock.sleep_ms(static_cast<std::int64_t>(domain.cost_model.latency_ms));
  }

  bool global = mode == RetrievalMode::Global;
  int k = global ? ctx.config.k_global : ctx.config.k_local;
  auto reports = select_context_reports(query, domain, k);
  json payload = make_partial_payload(query.text, mode,
                                      detail::context_reports_json(domain, reports, global));

  CallRecord record;
  record.stage = stage;
  record.role = AgentRole::PartialGenerator;
  record.domain_id = domain.id;
  record.mode = mode;
  record.started_at_ms = *started_at;

  AgentResponse response;
  try {
    response = ctx.backend.invoke(make_request(AgentRole::PartialGenerator, payload));
  } catch (const Error& e) {
    record.outcome = CallOutcome::Failed;
    record.failure_reason = e.what();
    ctx.ledger.append(std::move(record));
    throw;
  }

  record.tokens_in = response.usage.tokens_in + domain.cost_model.token_overhead;
  record.tokens_out = response.usage.tokens_out;
  ctx.ledger.append(record);

  PartialAnswer partial;
  partial.domain_id = domain.id;
  partial.mode = mode;
  partial.text = response.body["text"].get<std::string>();
  for (const auto* report : reports) partial.source_report_ids.push_back(report->id);
  partial.cost = CallCost{record.tokens_in, record.tokens_out, response.elapsed_ms};
  return partial;
}

inline PartialAnswer retrieve_global(RunContext& ctx, const Query& query,
                                     const DomainProfile& domain, Stage stage = Stage::Seeding) {
  return retrieve_with_mode(ctx, query, domain, RetrievalMode::Global, stage);
}

inline PartialAnswer retrieve_local(RunContext& ctx, const Query& query,
                                    const DomainProfile& domain, Stage stage = Stage::Seeding) {
  return retrieve_with_mode(ctx, query, domain, RetrievalMode::Local, stage);
}

struct RetrievalFailure {
  std::string domain_id;
  std::string reason;
};

struct SeedingOutcome {
  std::vector<PartialAnswer> partials;  // sorted by domain id
  std::vector<RetrievalFailure> failures;
};

/// Dispatch every plan entry concurrently. Per-domain failures are contained:
/// they are logged and reported, never propagated to sibling domains.
inline SeedingOutcome execute_seeding(RunContext& ctx, const SeedingPlan& plan,
                                      const Query& query) {
  if (plan.entries.empty()) {
    raise(ErrorCode::NoRelevantDomain, "seeding plan has no entries");
  }
  std::vector<std::optional<PartialAnswer>> slots(plan.entries.size());
  std::vector<std::optional<RetrievalFailure>> failures(plan.entries.size());

  parallel_for(plan.entries.size(), static_cast<std::size_t>(ctx.config.concurrency),
               [&](std::size_t i) {
                 const auto& [domain_id, mode] = plan.entries[i];
                 try {
                   slots[i] = retrieve_with_mode(ctx, query, ctx.registry.domain(domain_id),
                                                 mode, Stage::Seeding);
                 } catch (const Error& e) {
                   failures[i] = RetrievalFailure{domain_id, e.what()};
                 } catch (const std::exception& e) {
                   failures[i] = RetrievalFailure{domain_id, e.what()};
                 }
               });

  SeedingOutcome outcome;
  for (auto& slot : slots) {
    if (slot) outcome.partials.push_back(std::move(*slot));
  }
  for (auto& failure : failures) {
    if (failure) outcome.failures.push_back(std::move(*failure));
  }
  std::sort(outcome.partials.begin(), outcome.partials.end(),
            [](const PartialAnswer& a, const PartialAnswer& b) {
              return a.domain_id < b.domain_id;
            });
  return outcome;
}

namespace detail {

inline json partial_answers_json(const std::vector<PartialAnswer>& partials) {
  json arr = json::array();
  for (const auto& partial : partials) {
    arr.push_back(json{{"domain_id", partial.domain_id},
                       {"mode", to_string(partial.mode)},
                       {"text", partial.text}});
  }
  return arr;
}

/// Keep only attributions that reference contributing domains, then make
/// sure every contributing domain is attributed at least once.
inline std::vector<Attribution> consistent_attributions(
    const json& body, const std::vector<PartialAnswer>& partials,
    const std::set<std::string>& extra_valid_domains = {}) {
  std::set<std::string> valid = extra_valid_domains;
  std::map<std::string, const PartialAnswer*> by_domain;
  for (const auto& partial : partials) {
    valid.insert(partial.domain_id);
    by_domain.emplace(partial.domain_id, &partial);
  }

  std::vector<Attribution> attributions;
  std::set<std::string> covered;
  if (body.contains("attributions")) {
    for (const auto& a : body["attributions"]) {
      std::string domain_id = a["domain_id"].get<std::string>();
      if (!valid.count(domain_id)) continue;  // consistency pass: drop rogue references
      Attribution attribution;
      attribution.domain_id = domain_id;
      attribution.claim = a.value("claim", std::string{});
      if (a.contains("report_ids") && a["report_ids"].is_array()) {
        for (const auto& rid : a["report_ids"]) {
          attribution.report_ids.push_back(rid.get<std::string>());
        }
      }
      covered.insert(domain_id);
      attributions.push_back(std::move(attribution));
    }
  }
  for (const auto& partial : partials) {
    if (covered.count(partial.domain_id)) continue;
    attributions.push_back(
        Attribution{"", partial.domain_id, partial.source_report_ids});
    covered.insert(partial.domain_id);
  }
  return attributions;
}

}  // namespace detail

/// Shared synthesis call used for both the seed and later fusions.
inline SynthesizedAnswer run_synthesis(RunContext& ctx, const Query& query,
                                       const std::optional<std::string>& prior_answer,
                                       const std::vector<PartialAnswer>& partials, int iteration,
                                       Stage stage,
                                       const std::set<std::string>& carryover_domains = {}) {
  auto started_at = ctx.ledger.try_begin();
  if (!started_at) {
    raise(ErrorCode::BudgetExhausted, "budget gate closed before synthesis");
  }
  json payload = make_synthesis_payload(query.text, prior_answer,
                                        detail::partial_answers_json(partials));
  CallRecord record;
  record.stage = stage;
  record.role = AgentRole::Synthesizer;
  record.started_at_ms = *started_at;

  AgentResponse response;
  try {
    response = ctx.backend.invoke(make_request(AgentRole::Synthesizer, payload));
  } catch (const Error& e) {
    record.outcome = CallOutcome::Failed;
    record.failure_reason = e.what();
    ctx.ledger.append(std::move(record));
    raise(ErrorCode::SynthesisFailed, e.what());
  }

  record.tokens_in = response.usage.tokens_in;
  record.tokens_out = response.usage.tokens_out;
  ctx.ledger.append(std::move(record));

  SynthesizedAnswer answer;
  answer.text = response.body["text"].get<std::string>();
  answer.iteration = iteration;
  answer.attributions =
      detail::consistent_attributions(response.body, partials, carryover_domains);
  return answer;
}

/// Fuse the partial answers into the seed answer (iteration 0). Failure here
/// is fatal for the query: there is no earlier answer to fall back to.
inline SynthesizedAnswer synthesize_seed(RunContext& ctx, const Query& query,
                                         const std::vector<PartialAnswer>& partials) {
  if (partials.empty()) {
    raise(ErrorCode::SynthesisFailed, "no partial answers to synthesize");
  }
  return run_synthesis(ctx, query, std::nullopt, partials, 0, Stage::Seeding);
}

}  // namespace scout
