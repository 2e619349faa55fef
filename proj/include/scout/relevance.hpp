#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "scout/agents.hpp"
#include "scout/context.hpp"
#include "scout/core.hpp"
#include "scout/embedding.hpp"
#include "scout/errors.hpp"
#include "scout/ledger.hpp"
#include "scout/parallel.hpp"

namespace scout {

struct SignalScores {
  double s_sim = 0.0;
  double s_rich = 0.0;
  double s_hist = 0.0;

  bool operator==(const SignalScores&) const = default;
};

enum class RelevanceTier { Irrelevant = 0, Potential = 1, Moderate = 2, High = 3 };

inline const char* to_string(RelevanceTier tier) {
  switch (tier) {
    case RelevanceTier::High: return "HIGH";
    case RelevanceTier::Moderate: return "MODERATE";
    case RelevanceTier::Potential: return "POTENTIAL";
    case RelevanceTier::Irrelevant: return "IRRELEVANT";
  }
  return "?";
}

inline RelevanceTier parse_tier(const std::string& s) {
  if (s == "HIGH") return RelevanceTier::High;
  if (s == "MODERATE") return RelevanceTier::Moderate;
  if (s == "POTENTIAL") return RelevanceTier::Potential;
  if (s == "IRRELEVANT") return RelevanceTier::Irrelevant;
  raise(ErrorCode::ParseError, "unknown relevance tier '" + s + "'");
}

struct RelevanceAssessment {
  std::string domain_id;
  RelevanceTier tier = RelevanceTier::Irrelevant;
  SignalScores signals;
  double composite_score = 0.0;
  std::string rationale;

  bool operator==(const RelevanceAssessment&) const = default;
};

inline Embedding query_embedding(const Query& query) {
  if (query.embedding) return *query.embedding;
  return fallback_embedding(query.text);
}

inline Embedding domain_embedding(const DomainProfile& domain) {
  if (domain.embedding) return *domain.embedding;
  return fallback_embedding(domain.name + " " + domain.summary_text);
}

/// Cosine similarity between query and domain representations, mapped onto
/// [0,1]. Corpus embeddings are used only when the query brings one of its
/// own; otherwise both sides are embedded with the deterministic text
/// embedder so the comparison happens in one consistent space.
inline double semantic_similarity(const Query& query, const DomainProfile& domain) {
  if (query.embedding) {
    return similarity01(*query.embedding, domain_embedding(domain));
  }
  return similarity01(fallback_embedding(query.text),
                      fallback_embedding(domain.name + " " + domain.summary_text));
}

/// Report count of the domain normalized by the largest report count in the
/// registry, so the best-stocked domain always scores exactly 1.0.
inline double knowledge_richness(const DomainProfile& domain, const DomainRegistry& registry) {
  if (!registry.contains(domain.id)) {
    raise(ErrorCode::UnknownDomain, "domain '" + domain.id + "' is not registered");
  }
  std::size_t max_count = registry.max_report_count();
  if (max_count == 0) return 0.0;
  return static_cast<double>(domain.reports.size()) / static_cast<double>(max_count);
}

/// Mean of the domain's past quality scores; a neutral prior covers the
/// cold-start case with no history.
inline double historical_performance(const std::string& domain_id,
                                     const DomainRegistry& registry,
                                     double cold_start_prior = 0.5) {
  const auto& scores = registry.history(domain_id);
  if (scores.empty()) return cold_start_prior;
  double sum = std::accumulate(scores.begin(), scores.end(), 0.0);
  return sum / static_cast<double>(scores.size());
}

inline SignalScores compute_signals(const Query& query, const DomainProfile& domain,
                                    const DomainRegistry& registry,
                                    double cold_start_prior = 0.5) {
  return SignalScores{semantic_similarity(query, domain),
                      knowledge_richness(domain, registry),
                      historical_performance(domain.id, registry, cold_start_prior)};
}

inline double fallback_composite(const SignalScores& s, const SignalWeights& w) {
  double value = w.sim * s.s_sim + w.rich * s.s_rich + w.hist * s.s_hist;
  return std::clamp(value, 0.0, 1.0);
}

namespace detail {

inline RelevanceAssessment failed_assessment(const std::string& domain_id,
                                             const SignalScores& signals,
                                             const SignalWeights& weights) {
  // Fail open toward later breadth expansion, fail closed on immediate cost.
  return RelevanceAssessment{domain_id, RelevanceTier::Potential, signals,
                             fallback_composite(signals, weights), "assessment-failed"};
}

}  // namespace detail

/// Ask the assessor backend for a tier and rationale given the query and the
/// three signals. Backend failure degrades to POTENTIAL with rationale
/// "assessment-failed"; a blocked budget gate does the same without issuing
/// the call.
inline RelevanceAssessment assess_domain(RunContext& ctx, const Query& query,
                                         const DomainProfile& domain,
                                         const SignalScores& signals) {
  auto started_at = ctx.ledger.try_begin();
  if (!started_at) {
    return detail::failed_assessment(domain.id, signals, ctx.config.weights);
  }

  json payload = make_relevance_payload(query.text, domain.name, domain.summary_text,
                                        signals.s_sim, signals.s_rich, signals.s_hist);
  CallRecord record;
  record.stage = Stage::Relevance;
  record.role = AgentRole::RelevanceAssessor;
  record.domain_id = domain.id;
  record.started_at_ms = *started_at;

  AgentResponse response;
  try {
    response = ctx.backend.invoke(make_request(AgentRole::RelevanceAssessor, payload));
  } catch (const Error& e) {
    record.outcome = CallOutcome::Failed;
    record.failure_reason = e.what();
    ctx.ledger.append(std::move(record));
    return detail::failed_assessment(domain.id, signals, ctx.config.weights);
  }

  record.tokens_in = response.usage.tokens_in;
  record.tokens_out = response.usage.tokens_out;
  ctx.ledger.append(std::move(record));

  RelevanceAssessment assessment;
  assessment.domain_id = domain.id;
  assessment.signals = signals;
  assessment.tier = parse_tier(response.body["tier"].get<std::string>());
  assessment.rationale = response.body.value("rationale", std::string{});
  if (response.body.contains("score")) {
    assessment.composite_score = std::clamp(response.body["score"].get<double>(), 0.0, 1.0);
  } else {
    assessment.composite_score = fallback_composite(signals, ctx.config.weights);
  }
  return assessment;
}

/// Sort key: tier first, composite score second, domain id as the stable
/// final tiebreak.
inline void sort_assessments(std::vector<RelevanceAssessment>& assessments) {
  std::sort(assessments.begin(), assessments.end(),
            [](const RelevanceAssessment& a, const RelevanceAssessment& b) {
              if (a.tier != b.tier) return a.tier > b.tier;
              if (a.composite_score != b.composite_score) {
                return a.composite_score > b.composite_score;
              }
              return a.domain_id < b.domain_id;
            });
}

/// Assess every registered domain (concurrently, up to the configured
/// in-flight limit) and return the assessments in deterministic rank order
/// regardless of completion order.
inline std::vector<RelevanceAssessment> rank_domains(RunContext& ctx, const Query& query) {
  if (ctx.registry.empty()) {
    raise(ErrorCode::InvalidArgument, "registry is empty");
  }
  std::vector<const DomainProfile*> domains;
  domains.reserve(ctx.registry.size());
  for (const auto& [id, profile] : ctx.registry.domains()) domains.push_back(&profile);

  std::vector<RelevanceAssessment> assessments(domains.size());
  parallel_for(domains.size(), static_cast<std::size_t>(ctx.config.concurrency),
               [&](std::size_t i) {
                 const DomainProfile& domain = *domains[i];
                 SignalScores signals;
                 try {
                   signals = compute_signals(query, domain, ctx.registry,
                                             ctx.config.cold_start_prior);
                 } catch (const std::exception&) {
                   assessments[i] =
                       detail::failed_assessment(domain.id, signals, ctx.config.weights);
                   return;
                 }
                 assessments[i] = assess_domain(ctx, query, domain, signals);
               });

  sort_assessments(assessments);
  return assessments;
}

}  // namespace scout
