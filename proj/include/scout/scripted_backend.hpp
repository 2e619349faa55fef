#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "scout/agents.hpp"
#include "scout/clock.hpp"
#include "scout/errors.hpp"

namespace scout {

/// One canned exchange: either an exact match on (role, payload digest) or a
/// role-level wildcard consulted when no exact entry matches.
struct ScriptEntry {
  AgentRole role = AgentRole::RelevanceAssessor;
  std::optional<json> match_payload;        // digest computed from this at load
  std::optional<std::string> match_digest;  // or given directly
  bool wildcard = false;
  json response;
  std::optional<std::int64_t> tokens_in;
  std::optional<std::int64_t> tokens_out;
  std::int64_t elapsed_ms = 0;
};

namespace detail {

inline constexpr double kAutoTierWeightSim = 0.5;
inline constexpr double kAutoTierWeightRich = 0.25;
inline constexpr double kAutoTierWeightHist = 0.25;

/// Resolve response directives into a plain body. Both directives are pure
/// functions of the request payload, so the backend stays a deterministic
/// map from (role, payload digest) to response bytes.
///
///  - relevance `"tier": "auto"`: tier from the weighted signal composite
///    using the cutoffs HIGH>=0.55, MODERATE>=0.45, POTENTIAL>=0.30
///    (overridable per entry via `"auto_cutoffs": {high, moderate, potential}`).
///  - synthesis `"synthesize": {"base": ..., "append": ...}`: text is `base`
///    for a fresh synthesis and `prior_answer + append` when fusing, which
///    lets a hand-written script give every fusion round a distinct answer.
inline json resolve_directives(AgentRole role, json response, const json& payload) {
  if (role == AgentRole::RelevanceAssessor && response.value("tier", "") == "auto") {
    double composite = kAutoTierWeightSim * payload.value("s_sim", 0.0) +
                       kAutoTierWeightRich * payload.value("s_rich", 0.0) +
                       kAutoTierWeightHist * payload.value("s_hist", 0.0);
    double high = 0.55, moderate = 0.45, potential = 0.30;
    if (response.contains("auto_cutoffs")) {
      const json& cut = response["auto_cutoffs"];
      high = cut.value("high", high);
      moderate = cut.value("moderate", moderate);
      potential = cut.value("potential", potential);
      response.erase("auto_cutoffs");
    }
    std::string tier = composite >= high       ? "HIGH"
                       : composite >= moderate ? "MODERATE"
                       : composite >= potential ? "POTENTIAL"
                                                : "IRRELEVANT";
    response["tier"] = tier;
    response["score"] = composite;
    if (!response.contains("rationale")) {
      response["rationale"] = "auto-tier composite " + std::to_string(composite);
    }
  }
  if (role == AgentRole::Synthesizer && response.contains("synthesize")) {
    const json& directive = response["synthesize"];
    std::string base = directive.value("base", "synthesized answer");
    std::string append = directive.value("append", " (revised)");
    std::string text = payload.contains("prior_answer")
                           ? payload["prior_answer"].get<std::string>() + append
                           : base;
    response.erase("synthesize");
    response["text"] = text;
  }
  return response;
}

inline std::int64_t default_token_estimate(const json& value) {
  return static_cast<std::int64_t>(value.dump().size() / 4) + 1;
}

}  // namespace detail

/// Deterministic oracle backend: a pure function of (role, payload digest).
/// Exact entries win over the role wildcard. Immutable after construction,
/// so concurrent invoke calls need no locking.
class ScriptedBackend final : public AgentBackend {
 public:
  explicit ScriptedBackend(std::vector<ScriptEntry> entries, Clock* clock = nullptr)
      : entries_(std::move(entries)), clock_(clock) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      ScriptEntry& entry = entries_[i];
      if (entry.wildcard) {
        if (!wildcards_.emplace(entry.role, i).second) {
          raise(ErrorCode::DuplicateEntry,
                std::string("second wildcard for role ") + to_string(entry.role));
        }
        continue;
      }
      std::string digest;
      if (entry.match_digest) {
        digest = *entry.match_digest;
      } else if (entry.match_payload) {
        digest = payload_digest(*entry.match_payload);
        entry.match_digest = digest;
      } else {
        raise(ErrorCode::ParseError, "script entry has neither match payload nor wildcard");
      }
      if (!exact_.emplace(std::make_pair(entry.role, digest), i).second) {
        raise(ErrorCode::DuplicateEntry, std::string("duplicate entry for role ") +
                                             to_string(entry.role) + " digest " + digest);
      }
    }
  }

  AgentResponse invoke(const AgentRequest& request) override {
    validate_request_payload(request.role, request.payload);
    std::string digest = payload_digest(request.payload);
    const ScriptEntry* entry = nullptr;
    if (auto it = exact_.find({request.role, digest}); it != exact_.end()) {
      entry = &entries_[it->second];
    } else if (auto wit = wildcards_.find(request.role); wit != wildcards_.end()) {
      entry = &entries_[wit->second];
    } else {
      raise(ErrorCode::NoScriptMatch, std::string("no script entry for role ") +
                                          to_string(request.role) + " digest " + digest);
    }

    json body = detail::resolve_directives(request.role, entry->response, request.payload);
    validate_response_body(request.role, body);

    AgentResponse response;
    response.body = std::move(body);
    response.usage.tokens_in =
        entry->tokens_in.value_or(detail::default_token_estimate(request.payload));
    response.usage.tokens_out =
        entry->tokens_out.value_or(detail::default_token_estimate(response.body));
    response.elapsed_ms = entry->elapsed_ms;
    if (entry->elapsed_ms > 0 && clock_ != nullptr) {
      clock_->sleep_ms(entry->elapsed_ms);
    }
    return response;
  }

  std::size_t entry_count() const { return entries_.size(); }

 private:
  std::vector<ScriptEntry> entries_;
  std::map<std::pair<AgentRole, std::string>, std::size_t> exact_;
  std::map<AgentRole, std::size_t> wildcards_;
  Clock* clock_;
};

inline json script_entry_to_json(const ScriptEntry& entry) {
  json obj{{"role", to_string(entry.role)}, {"response", entry.response}};
  if (entry.wildcard) {
    obj["wildcard"] = true;
  } else if (entry.match_payload) {
    obj["payload"] = *entry.match_payload;
  } else if (entry.match_digest) {
    obj["digest"] = *entry.match_digest;
  }
  if (entry.tokens_in) obj["tokens_in"] = *entry.tokens_in;
  if (entry.tokens_out) obj["tokens_out"] = *entry.tokens_out;
  if (entry.elapsed_ms != 0) obj["elapsed_ms"] = entry.elapsed_ms;
  return obj;
}

inline json script_to_json(const std::vector<ScriptEntry>& entries) {
  json arr = json::array();
  for (const auto& entry : entries) arr.push_back(script_entry_to_json(entry));
  return json{{"entries", arr}};
}

inline ScriptEntry parse_script_entry(const json& obj, const std::string& where) {
  if (!obj.is_object()) raise(ErrorCode::ParseError, where + ": entry must be an object");
  ScriptEntry entry;
  if (!obj.contains("role") || !obj["role"].is_string()) {
    raise(ErrorCode::ParseError, where + ": entry missing 'role'");
  }
  entry.role = parse_agent_role(obj["role"].get<std::string>());
  entry.wildcard = obj.value("wildcard", false);
  if (obj.contains("payload")) entry.match_payload = obj["payload"];
  if (obj.contains("digest")) entry.match_digest = obj["digest"].get<std::string>();
  if (!entry.wildcard && !entry.match_payload && !entry.match_digest) {
    raise(ErrorCode::ParseError, where + ": entry needs 'payload', 'digest', or 'wildcard'");
  }
  if (!obj.contains("response") || !obj["response"].is_object()) {
    raise(ErrorCode::ParseError, where + ": entry missing object field 'response'");
  }
  entry.response = obj["response"];
  if (obj.contains("tokens_in")) entry.tokens_in = obj["tokens_in"].get<std::int64_t>();
  if (obj.contains("tokens_out")) entry.tokens_out = obj["tokens_out"].get<std::int64_t>();
  entry.elapsed_ms = obj.value("elapsed_ms", std::int64_t{0});
  if ((entry.tokens_in && *entry.tokens_in < 0) || (entry.tokens_out && *entry.tokens_out < 0) ||
      entry.elapsed_ms < 0) {
    raise(ErrorCode::ParseError, where + ": usage and elapsed values must be non-negative");
  }
  return entry;
}

inline std::vector<ScriptEntry> parse_script_json(const json& doc, const std::string& where) {
  const json* arr = nullptr;
  if (doc.is_array()) {
    arr = &doc;
  } else if (doc.is_object() && doc.contains("entries") && doc["entries"].is_array()) {
    arr = &doc["entries"];
  } else {
    raise(ErrorCode::ParseError, where + ": script must be an array or {\"entries\": [...]}");
  }
  std::vector<ScriptEntry> entries;
  entries.reserve(arr->size());
  std::size_t index = 0;
  for (const auto& item : *arr) {
    entries.push_back(parse_script_entry(item, where + " entry " + std::to_string(index)));
    ++index;
  }
  return entries;
}

inline std::vector<ScriptEntry> load_script_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot open '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    raise(ErrorCode::ParseError, path + ": " + e.what());
  }
  return parse_script_json(doc, path);
}

inline std::unique_ptr<ScriptedBackend> load_script(const std::string& path,
                                                    Clock* clock = nullptr) {
  return std::make_unique<ScriptedBackend>(load_script_file(path), clock);
}

}  // namespace scout
