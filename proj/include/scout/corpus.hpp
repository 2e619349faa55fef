#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "scout/core.hpp"
#include "scout/errors.hpp"

namespace scout {

/// One line of the corpus file, before validation.
struct ReportRecord {
  std::string report_id;
  std::string domain_id;
  std::string title;
  std::string text;
  std::optional<Embedding> embedding;

  bool operator==(const ReportRecord&) const = default;
};

/// One line of the optional domain sidecar file.
struct DomainRecord {
  std::string domain_id;
  std::string name;
  std::optional<std::string> summary;
  std::optional<Embedding> embedding;
  double latency_ms = 0.0;
  std::int64_t token_overhead = 0;

  bool operator==(const DomainRecord&) const = default;
};

namespace detail {

inline std::string require_string(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_string()) {
    raise(ErrorCode::ParseError, where + ": missing or non-string field '" + key + "'");
  }
  return obj[key].get<std::string>();
}

inline std::optional<Embedding> optional_embedding(const json& obj, const std::string& where) {
  if (!obj.contains("embedding") || obj["embedding"].is_null()) return std::nullopt;
  const json& arr = obj["embedding"];
  if (!arr.is_array()) {
    raise(ErrorCode::ParseError, where + ": 'embedding' must be an array of numbers");
  }
  Embedding e;
  e.reserve(arr.size());
  for (const auto& v : arr) {
    if (!v.is_number()) {
      raise(ErrorCode::ParseError, where + ": 'embedding' must be an array of numbers");
    }
    e.push_back(v.get<double>());
  }
  return e;
}

}  // namespace detail

inline ReportRecord parse_report_record(const json& obj, const std::string& where = "record") {
  ReportRecord rec;
  rec.report_id = detail::require_string(obj, "report_id", where);
  rec.domain_id = detail::require_string(obj, "domain_id", where);
  rec.title = obj.value("title", std::string{});
  rec.text = detail::require_string(obj, "text", where);
  rec.embedding = detail::optional_embedding(obj, where);
  return rec;
}

inline DomainRecord parse_domain_record(const json& obj, const std::string& where = "record") {
  DomainRecord rec;
  rec.domain_id = detail::require_string(obj, "domain_id", where);
  rec.name = obj.value("name", rec.domain_id);
  if (obj.contains("summary") && obj["summary"].is_string()) {
    rec.summary = obj["summary"].get<std::string>();
  }
  rec.embedding = detail::optional_embedding(obj, where);
  rec.latency_ms = obj.value("latency_ms", 0.0);
  rec.token_overhead = obj.value("token_overhead", std::int64_t{0});
  if (rec.latency_ms < 0.0) raise(ErrorCode::ParseError, where + ": negative latency_ms");
  if (rec.token_overhead < 0) raise(ErrorCode::ParseError, where + ": negative token_overhead");
  return rec;
}

namespace detail {

template <typename Parser>
auto load_jsonl(const std::string& path, Parser&& parse_line)
    -> std::vector<decltype(parse_line(json{}, std::string{}))> {
  std::ifstream in(path);
  if (!in) {
    raise(ErrorCode::IoError, "cannot open '" + path + "'");
  }
  std::vector<decltype(parse_line(json{}, std::string{}))> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim_copy(line).empty()) continue;
    std::string where = path + " line " + std::to_string(line_no);
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      raise(ErrorCode::ParseError, where + ": " + e.what());
    }
    records.push_back(parse_line(obj, where));
  }
  return records;
}

}  // namespace detail

inline std::vector<ReportRecord> load_corpus_file(const std::string& path) {
  return detail::load_jsonl(path, [](const json& obj, const std::string& where) {
    return parse_report_record(obj, where);
  });
}

inline std::vector<DomainRecord> load_domain_file(const std::string& path) {
  return detail::load_jsonl(path, [](const json& obj, const std::string& where) {
    return parse_domain_record(obj, where);
  });
}

inline std::string first_sentence(const std::string& text) {
  std::string trimmed = trim_copy(text);
  for (std::size_t i = 0; i < trimmed.size(); ++i) {
    char c = trimmed[i];
    if (c == '.' || c == '!' || c == '?') {
      return trimmed.substr(0, i + 1);
    }
  }
  return trimmed;
}

/// Group report records into a registry and enforce every corpus invariant:
/// unique report ids per domain, unit-norm embeddings of one consistent
/// dimension, no declared-but-empty domains. Domains iterate in id order.
inline DomainRegistry validate_corpus(const std::vector<ReportRecord>& records,
                                      const std::vector<DomainRecord>& domain_records = {}) {
  std::map<std::string, DomainRecord> sidecar;
  for (const auto& rec : domain_records) {
    if (!sidecar.emplace(rec.domain_id, rec).second) {
      raise(ErrorCode::DuplicateDomainId,
            "domain '" + rec.domain_id + "' declared twice in sidecar");
    }
  }

  std::size_t embedding_dim = 0;
  auto check_embedding = [&](const std::optional<Embedding>& e, const std::string& where) {
    if (!e) return;
    if (embedding_dim == 0) embedding_dim = e->size();
    if (e->size() != embedding_dim) {
      raise(ErrorCode::MalformedEmbedding,
            where + ": embedding dimension " + std::to_string(e->size()) +
                " differs from corpus dimension " + std::to_string(embedding_dim));
    }
    if (!is_unit_norm(*e)) {
      raise(ErrorCode::MalformedEmbedding, where + ": embedding is not unit-norm");
    }
  };

  // Group by domain, preserving record order within each domain.
  std::map<std::string, std::vector<CommunityReport>> grouped;
  std::map<std::string, std::set<std::string>> seen_ids;
  for (const auto& rec : records) {
    if (trim_copy(rec.report_id).empty() || trim_copy(rec.domain_id).empty()) {
      raise(ErrorCode::ParseError, "report with empty report_id or domain_id");
    }
    if (!seen_ids[rec.domain_id].insert(rec.report_id).second) {
      raise(ErrorCode::DuplicateReportId,
            "report '" + rec.report_id + "' appears twice in domain '" + rec.domain_id + "'");
    }
    check_embedding(rec.embedding, "report '" + rec.report_id + "'");
    grouped[rec.domain_id].push_back(
        CommunityReport{rec.report_id, rec.domain_id, rec.title, rec.text, rec.embedding});
  }

  for (const auto& [domain_id, rec] : sidecar) {
    if (!grouped.count(domain_id)) {
      raise(ErrorCode::EmptyDomain, "domain '" + domain_id + "' declared but has no reports");
    }
    check_embedding(rec.embedding, "domain '" + domain_id + "'");
  }

  DomainRegistry registry;
  for (auto& [domain_id, reports] : grouped) {
    DomainProfile profile;
    profile.id = domain_id;
    profile.reports = std::move(reports);
    auto it = sidecar.find(domain_id);
    if (it != sidecar.end()) {
      profile.name = it->second.name;
      profile.embedding = it->second.embedding;
      profile.cost_model = CostModel{it->second.latency_ms, it->second.token_overhead};
      if (it->second.summary) profile.summary_text = *it->second.summary;
    } else {
      profile.name = domain_id;
    }
    if (profile.summary_text.empty()) {
      std::string summary;
      for (const auto& report : profile.reports) {
        std::string sentence = first_sentence(report.text);
        if (sentence.empty()) continue;
        if (!summary.empty()) summary += ' ';
        summary += sentence;
      }
      profile.summary_text = summary;
    }
    registry.add_domain(std::move(profile));
  }
  return registry;
}

inline json report_record_to_json(const ReportRecord& rec) {
  json obj{{"report_id", rec.report_id},
           {"domain_id", rec.domain_id},
           {"title", rec.title},
           {"text", rec.text}};
  if (rec.embedding) obj["embedding"] = *rec.embedding;
  return obj;
}

inline json domain_record_to_json(const DomainRecord& rec) {
  json obj{{"domain_id", rec.domain_id},
           {"name", rec.name},
           {"latency_ms", rec.latency_ms},
           {"token_overhead", rec.token_overhead}};
  if (rec.summary) obj["summary"] = *rec.summary;
  if (rec.embedding) obj["embedding"] = *rec.embedding;
  return obj;
}

inline std::pair<std::vector<ReportRecord>, std::vector<DomainRecord>> registry_to_records(
    const DomainRegistry& registry) {
  std::vector<ReportRecord> reports;
  std::vector<DomainRecord> domains;
  for (const auto& [id, profile] : registry.domains()) {
    DomainRecord d;
    d.domain_id = id;
    d.name = profile.name;
    d.summary = profile.summary_text;
    d.embedding = profile.embedding;
    d.latency_ms = profile.cost_model.latency_ms;
    d.token_overhead = profile.cost_model.token_overhead;
    domains.push_back(std::move(d));
    for (const auto& report : profile.reports) {
      reports.push_back(
          ReportRecord{report.id, report.domain_id, report.title, report.text, report.embedding});
    }
  }
  return {std::move(reports), std::move(domains)};
}

template <typename Record, typename ToJson>
inline void write_jsonl(const std::string& path, const std::vector<Record>& records,
                        ToJson&& to_json_fn) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::IoError, "cannot write '" + path + "'");
  for (const auto& rec : records) {
    out << to_json_fn(rec).dump() << '\n';
  }
}

}  // namespace scout
