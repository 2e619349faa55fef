#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>

#include <json.hpp>

#include "scout/digest.hpp"
#include "scout/errors.hpp"

namespace scout {

/// The four cooperating agent roles behind the pipeline: per-domain relevance
/// assessment, domain-scoped partial answer generation, cross-domain answer
/// synthesis, and answer quality assessment.
enum class AgentRole { RelevanceAssessor, PartialGenerator, Synthesizer, QualityAssessor };

enum class RetrievalMode { Global, Local };

inline const char* to_string(AgentRole role) {
  switch (role) {
    case AgentRole::RelevanceAssessor: return "RelevanceAssessor";
    case AgentRole::PartialGenerator: return "PartialGenerator";
    case AgentRole::Synthesizer: return "Synthesizer";
    case AgentRole::QualityAssessor: return "QualityAssessor";
  }
  return "?";
}

inline AgentRole parse_agent_role(const std::string& s) {
  if (s == "RelevanceAssessor") return AgentRole::RelevanceAssessor;
  if (s == "PartialGenerator") return AgentRole::PartialGenerator;
  if (s == "Synthesizer") return AgentRole::Synthesizer;
  if (s == "QualityAssessor") return AgentRole::QualityAssessor;
  raise(ErrorCode::ParseError, "unknown agent role '" + s + "'");
}

inline const char* to_string(RetrievalMode mode) {
  return mode == RetrievalMode::Global ? "global" : "local";
}

inline RetrievalMode parse_retrieval_mode(const std::string& s) {
  if (s == "global") return RetrievalMode::Global;
  if (s == "local") return RetrievalMode::Local;
  raise(ErrorCode::ParseError, "unknown retrieval mode '" + s + "'");
}

struct AgentUsage {
  std::int64_t tokens_in = 0;
  std::int64_t tokens_out = 0;
};

struct AgentRequest {
  AgentRole role;
  json payload;
  std::string decode_schema;
};

struct AgentResponse {
  json body;
  AgentUsage usage;
  std::int64_t elapsed_ms = 0;
  int attempts = 1;
};

inline std::string schema_for_role(AgentRole role) {
  switch (role) {
    case AgentRole::RelevanceAssessor: return "relevance_assessment.v1";
    case AgentRole::PartialGenerator: return "partial_answer.v1";
    case AgentRole::Synthesizer: return "synthesis.v1";
    case AgentRole::QualityAssessor: return "quality_report.v1";
  }
  return "";
}

// --- request payload builders (one fixed key set per role) -----------------

inline json make_relevance_payload(const std::string& query_text, const std::string& domain_name,
                                   const std::string& domain_summary, double s_sim, double s_rich,
                                   double s_hist) {
  return json{{"query", query_text},       {"domain_name", domain_name},
              {"domain_summary", domain_summary}, {"s_sim", s_sim},
              {"s_rich", s_rich},          {"s_hist", s_hist}};
}

inline json make_partial_payload(const std::string& query_text, RetrievalMode mode,
                                 json context_reports) {
  return json{{"query", query_text}, {"mode", to_string(mode)},
              {"context_reports", std::move(context_reports)}};
}

inline json make_synthesis_payload(const std::string& query_text,
                                   const std::optional<std::string>& prior_answer,
                                   json partial_answers) {
  json payload{{"query", query_text}, {"partial_answers", std::move(partial_answers)}};
  if (prior_answer) payload["prior_answer"] = *prior_answer;
  return payload;
}

inline json make_quality_payload(const std::string& query_text, const std::string& answer_text) {
  return json{{"query", query_text}, {"answer", answer_text}};
}

// --- schema validation ------------------------------------------------------

namespace detail {

inline void require_keys(const json& payload, const std::set<std::string>& required,
                         const std::set<std::string>& optional, const char* role_name) {
  if (!payload.is_object()) {
    raise(ErrorCode::SchemaViolation, std::string(role_name) + " payload must be an object");
  }
  for (const auto& key : required) {
    if (!payload.contains(key)) {
      raise(ErrorCode::SchemaViolation,
            std::string(role_name) + " payload missing key '" + key + "'");
    }
  }
  for (auto it = payload.begin(); it != payload.end(); ++it) {
    if (!required.count(it.key()) && !optional.count(it.key())) {
      raise(ErrorCode::SchemaViolation,
            std::string(role_name) + " payload has unexpected key '" + it.key() + "'");
    }
  }
}

inline void require_number(const json& obj, const char* key, const char* what) {
  if (!obj.contains(key) || !obj[key].is_number()) {
    raise(ErrorCode::SchemaViolation, std::string(what) + " missing numeric field '" + key + "'");
  }
}

inline void require_nonempty_string(const json& obj, const char* key, const char* what) {
  if (!obj.contains(key) || !obj[key].is_string() ||
      trim_copy(obj[key].get<std::string>()).empty()) {
    raise(ErrorCode::SchemaViolation,
          std::string(what) + " missing non-empty string field '" + key + "'");
  }
}

inline void require_string_array_if_present(const json& obj, const char* key, const char* what) {
  if (!obj.contains(key)) return;
  if (!obj[key].is_array()) {
    raise(ErrorCode::SchemaViolation, std::string(what) + " field '" + key + "' must be an array");
  }
  for (const auto& item : obj[key]) {
    if (!item.is_string()) {
      raise(ErrorCode::SchemaViolation,
            std::string(what) + " field '" + key + "' must contain strings");
    }
  }
}

}  // namespace detail

inline void validate_request_payload(AgentRole role, const json& payload) {
  switch (role) {
    case AgentRole::RelevanceAssessor:
      detail::require_keys(payload,
                           {"query", "domain_name", "domain_summary", "s_sim", "s_rich", "s_hist"},
                           {}, "RelevanceAssessor");
      detail::require_number(payload, "s_sim", "RelevanceAssessor payload");
      detail::require_number(payload, "s_rich", "RelevanceAssessor payload");
      detail::require_number(payload, "s_hist", "RelevanceAssessor payload");
      break;
    case AgentRole::PartialGenerator: {
      detail::require_keys(payload, {"query", "mode", "context_reports"}, {}, "PartialGenerator");
      if (!payload["context_reports"].is_array()) {
        raise(ErrorCode::SchemaViolation, "PartialGenerator context_reports must be an array");
      }
      parse_retrieval_mode(payload["mode"].get<std::string>());
      break;
    }
    case AgentRole::Synthesizer:
      detail::require_keys(payload, {"query", "partial_answers"}, {"prior_answer"}, "Synthesizer");
      if (!payload["partial_answers"].is_array()) {
        raise(ErrorCode::SchemaViolation, "Synthesizer partial_answers must be an array");
      }
      break;
    case AgentRole::QualityAssessor:
      detail::require_keys(payload, {"query", "answer"}, {}, "QualityAssessor");
      break;
  }
}

inline void validate_response_body(AgentRole role, const json& body) {
  if (!body.is_object()) {
    raise(ErrorCode::SchemaViolation, "agent response must be a JSON object");
  }
  switch (role) {
    case AgentRole::RelevanceAssessor: {
      detail::require_nonempty_string(body, "tier", "relevance response");
      std::string tier = body["tier"].get<std::string>();
      if (tier != "HIGH" && tier != "MODERATE" && tier != "POTENTIAL" && tier != "IRRELEVANT") {
        raise(ErrorCode::SchemaViolation, "relevance response has unknown tier '" + tier + "'");
      }
      if (body.contains("score") && !body["score"].is_number()) {
        raise(ErrorCode::SchemaViolation, "relevance response score must be numeric");
      }
      break;
    }
    case AgentRole::PartialGenerator:
      detail::require_nonempty_string(body, "text", "partial response");
      break;
    case AgentRole::Synthesizer:
      detail::require_nonempty_string(body, "text", "synthesis response");
      if (body.contains("attributions")) {
        if (!body["attributions"].is_array()) {
          raise(ErrorCode::SchemaViolation, "synthesis attributions must be an array");
        }
        for (const auto& a : body["attributions"]) {
          if (!a.is_object() || !a.contains("domain_id") || !a["domain_id"].is_string()) {
            raise(ErrorCode::SchemaViolation, "synthesis attribution missing domain_id");
          }
        }
      }
      break;
    case AgentRole::QualityAssessor:
      detail::require_number(body, "completeness", "quality response");
      detail::require_number(body, "breadth", "quality response");
      detail::require_string_array_if_present(body, "gaps", "quality response");
      detail::require_string_array_if_present(body, "followups", "quality response");
      break;
  }
}

inline AgentRequest make_request(AgentRole role, json payload) {
  validate_request_payload(role, payload);
  return AgentRequest{role, std::move(payload), schema_for_role(role)};
}

/// Digest of the canonicalized payload; the scripted backend matches on
/// (role, digest) so formatting noise never breaks replay.
inline std::string payload_digest(const json& payload) { return digest_hex(payload); }

/// Uniform interface all four agents execute behind. Implementations must
/// accept concurrent invoke calls and must validate responses against the
/// request's decode schema before returning.
class AgentBackend {
 public:
  virtual ~AgentBackend() = default;
  virtual AgentResponse invoke(const AgentRequest& request) = 0;
};

}  // namespace scout
