#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "scout/core.hpp"
#include "scout/digest.hpp"
#include "scout/errors.hpp"

namespace scout {

/// Refinement-mode selection cutoffs. Defaults follow the tuned decision
/// table: deepen while completeness is below 0.75, broaden while breadth is
/// below 0.70, each guarded by a minimum of remaining seconds.
struct StrategyThresholds {
  double depth_completeness = 0.75;
  double breadth_coverage = 0.70;
  double depth_min_secs = 15.0;
  double breadth_min_secs = 10.0;
  double hybrid_min_secs = 20.0;

  bool operator==(const StrategyThresholds&) const = default;
};

/// Weights of the deterministic composite used when the assessor backend
/// returns no score: similarity carries half, richness and history a quarter
/// each.
struct SignalWeights {
  double sim = 0.5;
  double rich = 0.25;
  double hist = 0.25;

  bool operator==(const SignalWeights&) const = default;
};

enum class RunMode { Scout, CentralLocal, CentralGlobal, DriftCentral, DriftDecentral };

inline const char* to_string(RunMode mode) {
  switch (mode) {
    case RunMode::Scout: return "scout";
    case RunMode::CentralLocal: return "central-local";
    case RunMode::CentralGlobal: return "central-global";
    case RunMode::DriftCentral: return "drift-central";
    case RunMode::DriftDecentral: return "drift-decentral";
  }
  return "?";
}

inline RunMode parse_run_mode(const std::string& s) {
  if (s == "scout") return RunMode::Scout;
  if (s == "central-local") return RunMode::CentralLocal;
  if (s == "central-global") return RunMode::CentralGlobal;
  if (s == "drift-central") return RunMode::DriftCentral;
  if (s == "drift-decentral") return RunMode::DriftDecentral;
  raise(ErrorCode::InvalidArgument, "unknown mode '" + s + "'");
}

enum class BackendKind { Scripted, Http };

inline const char* to_string(BackendKind kind) {
  return kind == BackendKind::Scripted ? "scripted" : "http";
}

inline BackendKind parse_backend_kind(const std::string& s) {
  if (s == "scripted") return BackendKind::Scripted;
  if (s == "http") return BackendKind::Http;
  raise(ErrorCode::InvalidArgument, "unknown backend '" + s + "'");
}

struct RunConfig {
  RunMode mode = RunMode::Scout;
  BackendKind backend = BackendKind::Scripted;

  std::string corpus_path;
  std::string domains_path;
  std::string script_path;
  std::string endpoint;
  std::string model = "gpt-4o-mini";
  std::string api_key_env = "SCOUT_API_KEY";
  std::string output_path;

  Budget budget{};

  StrategyThresholds thresholds{};
  double quality_threshold = 0.85;
  double time_reserve_secs = 5.0;
  double epsilon = 0.01;
  int iteration_cap = 5;
  int k_global = 8;
  int k_local = 3;
  int followup_cap = 5;
  int concurrency = 8;
  std::uint64_t seed = 0;  // reserved for randomized tie fallbacks; none exist today
  double cold_start_prior = 0.5;
  SignalWeights weights{};
  bool simulated_clock = false;

  int http_max_attempts = 3;
  int http_backoff_ms = 250;
};

inline void validate_config(const RunConfig& config) {
  validate_budget(config.budget);
  if (config.epsilon != config.epsilon) raise(ErrorCode::InvalidArgument, "epsilon is NaN");
  if (config.iteration_cap < 1) raise(ErrorCode::InvalidArgument, "iteration_cap must be >= 1");
  if (config.k_global < 1 || config.k_local < 1) {
    raise(ErrorCode::InvalidArgument, "context sizes must be >= 1");
  }
  if (config.followup_cap < 1) raise(ErrorCode::InvalidArgument, "followup_cap must be >= 1");
  if (config.concurrency < 1) raise(ErrorCode::InvalidArgument, "concurrency must be >= 1");
  if (config.quality_threshold < 0.0 || config.quality_threshold > 1.0) {
    raise(ErrorCode::InvalidArgument, "quality_threshold must lie in [0,1]");
  }
  if (config.time_reserve_secs < 0.0) {
    raise(ErrorCode::InvalidArgument, "time_reserve_secs must be >= 0");
  }
}

/// Behavior-relevant view of the config. Filesystem paths are excluded so
/// the fingerprint is stable across machines; inputs are fingerprinted by
/// their bytes, not their location.
inline json config_to_json(const RunConfig& c) {
  return json{
      {"mode", to_string(c.mode)},
      {"backend", to_string(c.backend)},
      {"model", c.model},
      {"endpoint", c.endpoint},
      {"budget", {{"max_time_secs", c.budget.max_time_secs}, {"max_tokens", c.budget.max_tokens}}},
      {"thresholds",
       {{"depth_completeness", c.thresholds.depth_completeness},
        {"breadth_coverage", c.thresholds.breadth_coverage},
        {"depth_min_secs", c.thresholds.depth_min_secs},
        {"breadth_min_secs", c.thresholds.breadth_min_secs},
        {"hybrid_min_secs", c.thresholds.hybrid_min_secs}}},
      {"quality_threshold", c.quality_threshold},
      {"time_reserve_secs", c.time_reserve_secs},
      {"epsilon", c.epsilon},
      {"iteration_cap", c.iteration_cap},
      {"k_global", c.k_global},
      {"k_local", c.k_local},
      {"followup_cap", c.followup_cap},
      {"concurrency", c.concurrency},
      {"seed", c.seed},
      {"cold_start_prior", c.cold_start_prior},
      {"weights", {{"sim", c.weights.sim}, {"rich", c.weights.rich}, {"hist", c.weights.hist}}},
      {"simulated_clock", c.simulated_clock},
      {"http_max_attempts", c.http_max_attempts},
      {"http_backoff_ms", c.http_backoff_ms},
  };
}

inline RunConfig config_from_json(const json& doc, RunConfig base = {}) {
  if (!doc.is_object()) raise(ErrorCode::ParseError, "config must be a JSON object");
  RunConfig c = base;
  if (doc.contains("mode")) c.mode = parse_run_mode(doc["mode"].get<std::string>());
  if (doc.contains("backend")) c.backend = parse_backend_kind(doc["backend"].get<std::string>());
  c.model = doc.value("model", c.model);
  c.endpoint = doc.value("endpoint", c.endpoint);
  c.corpus_path = doc.value("corpus", c.corpus_path);
  c.domains_path = doc.value("domains", c.domains_path);
  c.script_path = doc.value("script", c.script_path);
  c.api_key_env = doc.value("api_key_env", c.api_key_env);
  c.output_path = doc.value("out", c.output_path);
  if (doc.contains("budget")) {
    const json& b = doc["budget"];
    c.budget.max_time_secs = b.value("max_time_secs", c.budget.max_time_secs);
    c.budget.max_tokens = b.value("max_tokens", c.budget.max_tokens);
  }
  if (doc.contains("thresholds")) {
    const json& t = doc["thresholds"];
    c.thresholds.depth_completeness =
        t.value("depth_completeness", c.thresholds.depth_completeness);
    c.thresholds.breadth_coverage = t.value("breadth_coverage", c.thresholds.breadth_coverage);
    c.thresholds.depth_min_secs = t.value("depth_min_secs", c.thresholds.depth_min_secs);
    c.thresholds.breadth_min_secs = t.value("breadth_min_secs", c.thresholds.breadth_min_secs);
    c.thresholds.hybrid_min_secs = t.value("hybrid_min_secs", c.thresholds.hybrid_min_secs);
  }
  c.quality_threshold = doc.value("quality_threshold", c.quality_threshold);
  c.time_reserve_secs = doc.value("time_reserve_secs", c.time_reserve_secs);
  c.epsilon = doc.value("epsilon", c.epsilon);
  c.iteration_cap = doc.value("iteration_cap", c.iteration_cap);
  c.k_global = doc.value("k_global", c.k_global);
  c.k_local = doc.value("k_local", c.k_local);
  c.followup_cap = doc.value("followup_cap", c.followup_cap);
  c.concurrency = doc.value("concurrency", c.concurrency);
  c.seed = doc.value("seed", c.seed);
  c.cold_start_prior = doc.value("cold_start_prior", c.cold_start_prior);
  if (doc.contains("weights")) {
    const json& w = doc["weights"];
    c.weights.sim = w.value("sim", c.weights.sim);
    c.weights.rich = w.value("rich", c.weights.rich);
    c.weights.hist = w.value("hist", c.weights.hist);
  }
  c.simulated_clock = doc.value("simulated_clock", c.simulated_clock);
  c.http_max_attempts = doc.value("http_max_attempts", c.http_max_attempts);
  c.http_backoff_ms = doc.value("http_backoff_ms", c.http_backoff_ms);
  return c;
}

inline std::string config_fingerprint(const RunConfig& config) {
  return digest_hex(config_to_json(config));
}

}  // namespace scout
