#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scout/digest.hpp"
#include "scout/embedding.hpp"
#include "scout/errors.hpp"

namespace scout {

struct Query {
  std::string id;
  std::string text;
  std::optional<Embedding> embedding;

  bool operator==(const Query&) const = default;
};

inline Query make_query(std::string id, std::string text,
                        std::optional<Embedding> embedding = std::nullopt) {
  if (trim_copy(text).empty()) {
    raise(ErrorCode::InvalidArgument, "query text is empty");
  }
  if (embedding && !is_unit_norm(*embedding)) {
    raise(ErrorCode::MalformedEmbedding, "query embedding is not unit-norm");
  }
  return Query{std::move(id), std::move(text), std::move(embedding)};
}

struct CommunityReport {
  std::string id;
  std::string domain_id;
  std::string title;
  std::string text;
  std::optional<Embedding> embedding;

  bool operator==(const CommunityReport&) const = default;
};

/// Per-call cost of reaching into one domain: simulated transit latency plus
/// a flat token surcharge added to every retrieval against it.
struct CostModel {
  double latency_ms = 0.0;
  std::int64_t token_overhead = 0;

  bool operator==(const CostModel&) const = default;
};

struct DomainProfile {
  std::string id;
  std::string name;
  std::vector<CommunityReport> reports;
  std::string summary_text;
  std::optional<Embedding> embedding;
  CostModel cost_model;

  bool operator==(const DomainProfile&) const = default;
};

struct Budget {
  double max_time_secs = 300.0;
  std::int64_t max_tokens = 2'000'000;

  bool operator==(const Budget&) const = default;
};

inline void validate_budget(const Budget& budget) {
  if (budget.max_time_secs <= 0.0) {
    raise(ErrorCode::InvalidArgument, "time budget must be positive");
  }
  if (budget.max_tokens <= 0) {
    raise(ErrorCode::InvalidArgument, "token budget must be positive");
  }
}

/// Immutable-after-construction set of domains, iterated in lexicographic id
/// order. Per-domain history of past quality scores is the only mutable part
/// and is updated between queries under single-writer discipline.
class DomainRegistry {
 public:
  void add_domain(DomainProfile profile) {
    if (profile.reports.empty()) {
      raise(ErrorCode::EmptyDomain, "domain '" + profile.id + "' has no reports");
    }
    if (domains_.count(profile.id)) {
      raise(ErrorCode::DuplicateDomainId, "domain '" + profile.id + "' already registered");
    }
    if (profile.embedding && !is_unit_norm(*profile.embedding)) {
      raise(ErrorCode::MalformedEmbedding,
            "domain '" + profile.id + "' embedding is not unit-norm");
    }
    std::string id = profile.id;
    domains_.emplace(std::move(id), std::move(profile));
  }

  bool contains(const std::string& id) const { return domains_.count(id) > 0; }

  const DomainProfile& domain(const std::string& id) const {
    auto it = domains_.find(id);
    if (it == domains_.end()) {
      raise(ErrorCode::UnknownDomain, "domain '" + id + "' is not registered");
    }
    return it->second;
  }

  const std::map<std::string, DomainProfile>& domains() const { return domains_; }

  std::size_t size() const { return domains_.size(); }
  bool empty() const { return domains_.empty(); }

  std::vector<std::string> domain_ids() const {
    std::vector<std::string> ids;
    ids.reserve(domains_.size());
    for (const auto& [id, profile] : domains_) ids.push_back(id);
    return ids;
  }

  std::size_t max_report_count() const {
    std::size_t max_count = 0;
    for (const auto& [id, profile] : domains_) {
      max_count = std::max(max_count, profile.reports.size());
    }
    return max_count;
  }

  std::size_t min_report_count() const {
    std::size_t min_count = 0;
    bool first = true;
    for (const auto& [id, profile] : domains_) {
      min_count = first ? profile.reports.size() : std::min(min_count, profile.reports.size());
      first = false;
    }
    return min_count;
  }

  const std::vector<double>& history(const std::string& id) const {
    require_known(id);
    auto it = history_.find(id);
    if (it == history_.end()) {
      static const std::vector<double> kEmpty;
      return kEmpty;
    }
    return it->second;
  }

  void record_quality(const std::string& id, double score) {
    require_known(id);
    if (score < 0.0 || score > 1.0) {
      raise(ErrorCode::InvalidArgument, "history score out of [0,1]");
    }
    history_[id].push_back(score);
  }

  bool operator==(const DomainRegistry&) const = default;

 private:
  void require_known(const std::string& id) const {
    if (!contains(id)) {
      raise(ErrorCode::UnknownDomain, "domain '" + id + "' is not registered");
    }
  }

  std::map<std::string, DomainProfile> domains_;
  std::map<std::string, std::vector<double>> history_;
};

}  // namespace scout
