#pragma once

#include "scout/agents.hpp"
#include "scout/clock.hpp"
#include "scout/config.hpp"
#include "scout/core.hpp"
#include "scout/ledger.hpp"

namespace scout {

/// Everything one query run needs: the shared immutable registry, the agent
/// backend, the run-scoped ledger (which carries budget and clock), and the
/// knob set. Cheap to pass by reference through the pipeline stages.
struct RunContext {
  const DomainRegistry& registry;
  AgentBackend& backend;
  CostLedger& ledger;
  Clock& clock;
  const RunConfig& config;

  double remaining_secs() const { return ledger.remaining_secs(); }

  bool budget_gate_closed() const {
    return remaining_secs() < ledger.reserve_secs() ||
           check_token_budget(ledger, ledger.budget()) == TokenBudgetState::Exceeded;
  }
};

}  // namespace scout
