#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "scout/agents.hpp"
#include "scout/clock.hpp"
#include "scout/core.hpp"

namespace scout {

enum class Stage { Relevance, Seeding, Refinement, Baseline };

inline const char* to_string(Stage stage) {
  switch (stage) {
    case Stage::Relevance: return "relevance";
    case Stage::Seeding: return "seeding";
    case Stage::Refinement: return "refinement";
    case Stage::Baseline: return "baseline";
  }
  return "?";
}

enum class CallOutcome { Success, Failed };

struct CallRecord {
  std::int64_t sequence_no = -1;
  Stage stage = Stage::Relevance;
  AgentRole role = AgentRole::RelevanceAssessor;
  std::optional<std::string> domain_id;
  std::optional<RetrievalMode> mode;
  std::int64_t tokens_in = 0;
  std::int64_t tokens_out = 0;
  std::int64_t started_at_ms = 0;
  std::int64_t ended_at_ms = 0;
  CallOutcome outcome = CallOutcome::Success;
  std::string failure_reason;
};

struct LedgerTotals {
  std::int64_t total_calls = 0;
  std::int64_t failed_calls = 0;
  std::int64_t total_tokens_in = 0;
  std::int64_t total_tokens_out = 0;
  std::map<std::string, std::int64_t> per_domain_calls;

  std::int64_t total_tokens() const { return total_tokens_in + total_tokens_out; }
};

enum class TokenBudgetState { Ok, Exceeded };

/// Remaining wall-clock budget in seconds, floored at zero.
inline double remaining_time(const Budget& budget, const Clock& clock,
                             std::int64_t started_at_ms) {
  double elapsed_secs = static_cast<double>(clock.now_ms() - started_at_ms) / 1000.0;
  return std::max(0.0, budget.max_time_secs - elapsed_secs);
}

/// Append-only record of every agent call in one query run, bound to the
/// run's budget and clock. The admission gate (try_begin) and the append
/// share one mutex, so once the token budget is exceeded or the time reserve
/// is gone, no later call can obtain a start stamp: started_at is assigned
/// inside the same critical section that tracks exceedance.
class CostLedger {
 public:
  CostLedger(Clock& clock, Budget budget, double reserve_secs = 5.0)
      : clock_(clock),
        budget_(budget),
        reserve_secs_(reserve_secs),
        run_started_ms_(clock.now_ms()) {}

  /// Admission gate for every backend call. Returns the start timestamp, or
  /// nullopt when the call must not start (time reserve gone or token budget
  /// already exceeded). In-flight calls are unaffected; they complete and
  /// are recorded.
  std::optional<std::int64_t> try_begin() {
    std::lock_guard<std::mutex> lock(mutex_);
    if (totals_.total_tokens() > budget_.max_tokens) return std::nullopt;
    std::int64_t now = clock_.now_ms();
    double remaining = budget_.max_time_secs -
                       static_cast<double>(now - run_started_ms_) / 1000.0;
    if (remaining < reserve_secs_) return std::nullopt;
    return now;
  }

  void append(CallRecord record) {
    std::lock_guard<std::mutex> lock(mutex_);
    record.sequence_no = static_cast<std::int64_t>(records_.size());
    record.ended_at_ms = std::max(clock_.now_ms(), record.started_at_ms);
    totals_.total_calls += 1;
    if (record.outcome == CallOutcome::Failed) totals_.failed_calls += 1;
    totals_.total_tokens_in += record.tokens_in;
    totals_.total_tokens_out += record.tokens_out;
    if (record.domain_id) totals_.per_domain_calls[*record.domain_id] += 1;
    records_.push_back(std::move(record));
    if (exceeded_at_ms_ < 0 && totals_.total_tokens() > budget_.max_tokens) {
      exceeded_at_ms_ = records_.back().ended_at_ms;
    }
  }

  std::vector<CallRecord> records() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return records_;
  }

  LedgerTotals totals() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return totals_;
  }

  /// Timestamp at which the token budget was first exceeded, if ever.
  std::optional<std::int64_t> exceeded_at_ms() const {
    std::lock_guard<std::mutex> lock(mutex_);
    if (exceeded_at_ms_ < 0) return std::nullopt;
    return exceeded_at_ms_;
  }

  double remaining_secs() const { return remaining_time(budget_, clock_, run_started_ms_); }

  std::int64_t run_started_ms() const { return run_started_ms_; }
  const Budget& budget() const { return budget_; }
  double reserve_secs() const { return reserve_secs_; }
  Clock& clock() const { return clock_; }

 private:
  Clock& clock_;
  Budget budget_;
  double reserve_secs_;
  std::int64_t run_started_ms_;

  mutable std::mutex mutex_;
  std::vector<CallRecord> records_;
  LedgerTotals totals_;
  std::int64_t exceeded_at_ms_ = -1;
};

inline void record_call(CostLedger& ledger, CallRecord record) {
  ledger.append(std::move(record));
}

inline TokenBudgetState check_token_budget(const CostLedger& ledger, const Budget& budget) {
  return ledger.totals().total_tokens() > budget.max_tokens ? TokenBudgetState::Exceeded
                                                            : TokenBudgetState::Ok;
}

/// Brute-force recomputation of totals from the raw records.
inline LedgerTotals fold_records(const std::vector<CallRecord>& records) {
  LedgerTotals totals;
  for (const auto& record : records) {
    totals.total_calls += 1;
    if (record.outcome == CallOutcome::Failed) totals.failed_calls += 1;
    totals.total_tokens_in += record.tokens_in;
    totals.total_tokens_out += record.tokens_out;
    if (record.domain_id) totals.per_domain_calls[*record.domain_id] += 1;
  }
  return totals;
}

struct StageCost {
  std::int64_t calls = 0;
  std::int64_t tokens_in = 0;
  std::int64_t tokens_out = 0;
  std::int64_t wall_ms = 0;  // span from first start to last end within the stage
  std::int64_t busy_ms = 0;  // summed per-call durations
};

inline std::map<Stage, StageCost> stage_costs(const std::vector<CallRecord>& records) {
  std::map<Stage, StageCost> out;
  std::map<Stage, std::pair<std::int64_t, std::int64_t>> spans;
  for (const auto& record : records) {
    StageCost& cost = out[record.stage];
    cost.calls += 1;
    cost.tokens_in += record.tokens_in;
    cost.tokens_out += record.tokens_out;
    cost.busy_ms += record.ended_at_ms - record.started_at_ms;
    auto [it, inserted] =
        spans.emplace(record.stage, std::make_pair(record.started_at_ms, record.ended_at_ms));
    if (!inserted) {
      it->second.first = std::min(it->second.first, record.started_at_ms);
      it->second.second = std::max(it->second.second, record.ended_at_ms);
    }
  }
  for (auto& [stage, cost] : out) {
    cost.wall_ms = spans[stage].second - spans[stage].first;
  }
  return out;
}

}  // namespace scout
