#pragma once

// Umbrella header for the tiered cross-domain retrieval orchestrator.

#include "scout/agents.hpp"
#include "scout/baselines.hpp"
#include "scout/clock.hpp"
#include "scout/config.hpp"
#include "scout/context.hpp"
#include "scout/core.hpp"
#include "scout/corpus.hpp"
#include "scout/digest.hpp"
#include "scout/embedding.hpp"
#include "scout/errors.hpp"
#include "scout/http_backend.hpp"
#include "scout/ledger.hpp"
#include "scout/orchestrator.hpp"
#include "scout/parallel.hpp"
#include "scout/quality.hpp"
#include "scout/refinement.hpp"
#include "scout/relevance.hpp"
#include "scout/report.hpp"
#include "scout/scripted_backend.hpp"
#include "scout/seeding.hpp"
