#include <gtest/gtest.h>

#include <map>

#include "fixtures.hpp"
#include "scout/baselines.hpp"

namespace scout {
namespace {

using testing::Harness;
using testing::test_registry;

struct CallCounts {
  std::size_t retrievals = 0;
  std::size_t syntheses = 0;
  std::size_t assessments = 0;
};

CallCounts count_calls(const CostLedger& ledger) {
  CallCounts counts;
  for (const auto& record : ledger.records()) {
    switch (record.role) {
      case AgentRole::PartialGenerator: ++counts.retrievals; break;
      case AgentRole::Synthesizer: ++counts.syntheses; break;
      case AgentRole::QualityAssessor: ++counts.assessments; break;
      default: break;
    }
  }
  return counts;
}

DomainRegistry registry_of_size(int m) {
  std::vector<std::pair<std::string, int>> counts;
  for (int i = 0; i < m; ++i) {
    counts.emplace_back("d" + std::to_string(100 + i), 3 + i % 4);
  }
  return test_registry(counts);
}

TEST(Baselines, CentralLocalIssuesExactlyOneRetrieval) {
  for (int m : {1, 5, 10}) {
    Harness h(registry_of_size(m), testing::wildcard_script());
    BaselineResult result =
        run_baseline(h.ctx(), BaselineMode::CentralLocal, make_query("q", "anything"));
    EXPECT_EQ(result.status, RunStatus::Success);
    CallCounts counts = count_calls(h.ledger());
    EXPECT_EQ(counts.retrievals, 1u) << "m=" << m;
    EXPECT_EQ(counts.syntheses, 0u);
    EXPECT_FALSE(result.answer.empty());
  }
}

TEST(Baselines, CentralGlobalIssuesExactlyOneRetrieval) {
  Harness h(registry_of_size(7), testing::wildcard_script());
  BaselineResult result =
      run_baseline(h.ctx(), BaselineMode::CentralGlobal, make_query("q", "anything"));
  EXPECT_EQ(result.status, RunStatus::Success);
  EXPECT_EQ(count_calls(h.ledger()).retrievals, 1u);
}

TEST(Baselines, DriftCentralIssuesExactlySevenRetrievals) {
  Harness h(registry_of_size(9), testing::wildcard_script());
  BaselineResult result =
      run_baseline(h.ctx(), BaselineMode::DriftCentral, make_query("q", "anything"));
  EXPECT_EQ(result.status, RunStatus::Success);
  CallCounts counts = count_calls(h.ledger());
  EXPECT_EQ(counts.retrievals, 7u);  // 1 global + 2 rounds x 3 locals
  EXPECT_EQ(counts.syntheses, 1u);
}

TEST(Baselines, DriftDecentralCallFormulaHoldsAcrossRegistrySizes) {
  for (int m : {1, 5, 10, 20}) {
    Harness h(registry_of_size(m), testing::wildcard_script());
    BaselineResult result =
        run_baseline(h.ctx(), BaselineMode::DriftDecentral, make_query("q", "anything"));
    EXPECT_EQ(result.status, RunStatus::Success);
    CallCounts counts = count_calls(h.ledger());
    EXPECT_EQ(counts.retrievals, static_cast<std::size_t>(7 * m)) << "m=" << m;
    EXPECT_EQ(counts.syntheses, static_cast<std::size_t>(m + 1)) << "m=" << m;
    // Domain-scoped cost: exactly seven calls land on every real domain.
    LedgerTotals totals = h.ledger().totals();
    ASSERT_EQ(totals.per_domain_calls.size(), static_cast<std::size_t>(m));
    for (const auto& [domain_id, calls] : totals.per_domain_calls) {
      EXPECT_EQ(calls, 7) << domain_id;
    }
  }
}

TEST(Baselines, MergedDomainPoolsEveryReportWithUniqueIds) {
  DomainRegistry registry = test_registry({{"a", 2}, {"b", 3}});
  DomainProfile merged = merged_domain(registry);
  EXPECT_EQ(merged.reports.size(), 5u);
  std::set<std::string> ids;
  for (const auto& report : merged.reports) ids.insert(report.id);
  EXPECT_EQ(ids.size(), 5u);  // "a/r0" and "b/r0" stay distinct
  EXPECT_TRUE(ids.count("a/r0"));
  EXPECT_TRUE(ids.count("b/r0"));
  EXPECT_FALSE(merged.summary_text.empty());
}

TEST(Baselines, AllCallsLandInBaselineStage) {
  Harness h(registry_of_size(3), testing::wildcard_script());
  run_baseline(h.ctx(), BaselineMode::DriftDecentral, make_query("q", "anything"));
  for (const auto& record : h.ledger().records()) {
    EXPECT_EQ(record.stage, Stage::Baseline);
  }
}

TEST(Baselines, BudgetGateAppliesIdentically) {
  RunConfig config;
  config.budget.max_time_secs = 4.0;  // inside the reserve from the start
  Harness h(registry_of_size(3), testing::wildcard_script(), config);
  BaselineResult result =
      run_baseline(h.ctx(), BaselineMode::DriftDecentral, make_query("q", "anything"));
  EXPECT_EQ(result.status, RunStatus::BudgetExhaustedBeforeSeed);
  EXPECT_EQ(h.ledger().records().size(), 0u);
}

TEST(Baselines, ScoutStageTwoCheaperThanDriftDecentralAtCaseStudyShape) {
  auto fx = testing::case_study_fixture();

  Harness scout_run(std::move(fx.registry), fx.entries);
  ScoutRunResult scout_result = run_scout(scout_run.ctx(), fx.query);
  ASSERT_EQ(scout_result.status, RunStatus::Success);
  std::size_t stage2 = 0;
  for (const auto& record : scout_run.ledger().records()) {
    if (record.stage == Stage::Seeding && record.role == AgentRole::PartialGenerator) ++stage2;
  }

  auto fx2 = testing::case_study_fixture();
  Harness drift_run(std::move(fx2.registry), fx2.entries);
  run_baseline(drift_run.ctx(), BaselineMode::DriftDecentral, fx2.query);
  CallCounts drift = count_calls(drift_run.ledger());

  EXPECT_EQ(stage2, 8u);
  EXPECT_EQ(drift.retrievals, 315u);  // 7 x 45
  EXPECT_LE(stage2, 10u);
  EXPECT_LT(static_cast<double>(stage2), 7.0 * 45.0);
}

}  // namespace
}  // namespace scout
