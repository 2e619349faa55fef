#pragma once

#include <algorithm>
#include <cstdlib>
#include <map>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "scout/agents.hpp"
#include "scout/clock.hpp"
#include "scout/errors.hpp"

namespace scout {

struct HttpBackendConfig {
  std::string endpoint;  // full URL, e.g. http://host:8080/v1/chat/completions
  std::string model = "gpt-4o-mini";
  std::string api_key_env = "SCOUT_API_KEY";
  double temperature = 0.0;
  int max_attempts = 3;
  int backoff_ms = 250;  // doubles per retry
  int max_in_flight = 8;
  double timeout_secs = 60.0;
  std::map<AgentRole, std::string> prompts;  // per-role system prompt overrides
};

namespace detail {

/// Default system prompts. These are engineering defaults, not validated
/// against any reference deployment; override per role via the config.
inline std::string default_prompt(AgentRole role) {
  switch (role) {
    case AgentRole::RelevanceAssessor:
      return "You assess whether one knowledge domain is relevant to a query. "
             "The user message is a JSON object with the query, the domain name and "
             "summary, and three signals in [0,1]: s_sim (semantic similarity), s_rich "
             "(relative data abundance), s_hist (historical answer quality). Reply with "
             "ONLY a JSON object: {\"tier\": one of \"HIGH\"|\"MODERATE\"|\"POTENTIAL\"|"
             "\"IRRELEVANT\", \"score\": number in [0,1], \"rationale\": short string}.";
    case AgentRole::PartialGenerator:
      return "You answer a query using ONLY the provided context reports from one "
             "knowledge domain. The user message is a JSON object with the query, the "
             "retrieval mode, and context_reports. Reply with ONLY a JSON object: "
             "{\"text\": your grounded answer}.";
    case AgentRole::Synthesizer:
      return "You fuse partial answers from several knowledge domains into one coherent "
             "answer with source attribution. The user message is a JSON object with the "
             "query, optional prior_answer, and partial_answers. Reply with ONLY a JSON "
             "object: {\"text\": fused answer, \"attributions\": [{\"claim\": string, "
             "\"domain_id\": string}]}.";
    case AgentRole::QualityAssessor:
      return "You grade an answer to a query. Reply with ONLY a JSON object: "
             "{\"completeness\": number in [0,1] (coverage of core elements), \"breadth\": "
             "number in [0,1] (coverage across subtopics), \"gaps\": [strings], "
             "\"followups\": [targeted follow-up questions]}.";
  }
  return "";
}

struct SplitUrl {
  std::string base;  // scheme://host[:port]
  std::string path;
};

inline SplitUrl split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    raise(ErrorCode::InvalidArgument, "endpoint must include a scheme: " + url);
  }
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return SplitUrl{url, "/"};
  return SplitUrl{url.substr(0, path_start), url.substr(path_start)};
}

/// Models reply with fenced ```json blocks often enough that we strip them.
inline std::string strip_code_fence(const std::string& content) {
  std::string s = trim_copy(content);
  if (s.rfind("```", 0) != 0) return s;
  auto first_newline = s.find('\n');
  if (first_newline == std::string::npos) return s;
  auto closing = s.rfind("```");
  if (closing <= first_newline) return s;
  return trim_copy(s.substr(first_newline + 1, closing - first_newline - 1));
}

}  // namespace detail

/// Chat-completion client for one generic POST endpoint. Transient transport
/// failures and malformed bodies are retried with exponential backoff (paid
/// on the run clock, so it counts toward the time budget); tokens of failed
/// attempts count only when the provider reported usage for them. In-flight
/// requests are bounded by a semaphore.
class HttpBackend final : public AgentBackend {
 public:
  HttpBackend(HttpBackendConfig config, Clock* clock)
      : config_(std::move(config)),
        clock_(clock),
        in_flight_(std::max(1, config_.max_in_flight)) {
    if (config_.endpoint.empty()) {
      raise(ErrorCode::InvalidArgument, "http backend requires an endpoint");
    }
    if (const char* key = std::getenv(config_.api_key_env.c_str())) {
      api_key_ = key;
    }
  }

  AgentResponse invoke(const AgentRequest& request) override {
    validate_request_payload(request.role, request.payload);
    in_flight_.acquire();
    struct Release {
      std::counting_semaphore<>& sem;
      ~Release() { sem.release(); }
    } release{in_flight_};

    auto url = detail::split_url(config_.endpoint);
    httplib::Client client(url.base);
    client.set_connection_timeout(static_cast<time_t>(config_.timeout_secs), 0);
    client.set_read_timeout(static_cast<time_t>(config_.timeout_secs), 0);

    std::string prompt = config_.prompts.count(request.role)
                             ? config_.prompts.at(request.role)
                             : detail::default_prompt(request.role);
    json body{{"model", config_.model},
              {"temperature", config_.temperature},
              {"messages", json::array({json{{"role", "system"}, {"content", prompt}},
                                        json{{"role", "user"},
                                             {"content", request.payload.dump()}}})}};

    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    AgentUsage usage;
    std::int64_t started = clock_ ? clock_->now_ms() : 0;
    std::string last_error = "no attempts made";
    bool last_was_decode = false;

    for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
      if (attempt > 1 && clock_) {
        clock_->sleep_ms(static_cast<std::int64_t>(config_.backoff_ms) << (attempt - 2));
      }
      auto res = client.Post(url.path, headers, body.dump(), "application/json");
      if (!res) {
        last_error = "transport error: " + httplib::to_string(res.error());
        last_was_decode = false;
        continue;
      }
      json envelope;
      try {
        envelope = json::parse(res->body);
      } catch (const json::exception& e) {
        last_error = std::string("unparseable response body: ") + e.what();
        last_was_decode = true;
        continue;
      }
      if (envelope.contains("usage")) {
        // Usage counts whenever the provider reports it, even on attempts
        // whose body we end up rejecting.
        usage.tokens_in += std::max<std::int64_t>(
            0, envelope["usage"].value("prompt_tokens", std::int64_t{0}));
        usage.tokens_out += std::max<std::int64_t>(
            0, envelope["usage"].value("completion_tokens", std::int64_t{0}));
      }
      if (res->status != 200) {
        last_error = "http status " + std::to_string(res->status);
        last_was_decode = false;
        continue;
      }
      try {
        std::string content =
            envelope.at("choices").at(0).at("message").at("content").get<std::string>();
        json decoded = json::parse(detail::strip_code_fence(content));
        validate_response_body(request.role, decoded);
        AgentResponse response;
        response.body = std::move(decoded);
        response.usage = usage;
        response.elapsed_ms = clock_ ? clock_->now_ms() - started : 0;
        response.attempts = attempt;
        return response;
      } catch (const Error& e) {
        last_error = e.what();
        last_was_decode = true;
      } catch (const json::exception& e) {
        last_error = std::string("malformed completion payload: ") + e.what();
        last_was_decode = true;
      }
    }

    if (last_was_decode) {
      raise(ErrorCode::SchemaViolation,
            "after " + std::to_string(config_.max_attempts) + " attempts: " + last_error);
    }
    raise(ErrorCode::TransportFailure,
          "after " + std::to_string(config_.max_attempts) + " attempts: " + last_error);
  }

 private:
  HttpBackendConfig config_;
  Clock* clock_;
  std::string api_key_;
  std::counting_semaphore<> in_flight_;
};

}  // namespace scout
