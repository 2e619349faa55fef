#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "fixtures.hpp"
#include "scout/agents.hpp"
#include "scout/scripted_backend.hpp"

namespace scout {
namespace {

using testing::exact_entry;
using testing::wildcard_entry;

TEST(PayloadDigest, RobustToFormattingNoise) {
  json a{{"query", "What Is Up"}, {"answer", "  text  "}};
  json b{{"answer", "text"}, {"query", "what is up"}};
  EXPECT_EQ(payload_digest(a), payload_digest(b));
  json c{{"query", "different"}, {"answer", "text"}};
  EXPECT_NE(payload_digest(a), payload_digest(c));
}

TEST(PayloadDigest, CanonicalizationRecursesIntoArrays) {
  json a{{"partial_answers", json::array({json{{"text", " x "}, {"domain_id", "a"}}})},
         {"query", "Q"}};
  json b{{"query", "q"},
         {"partial_answers", json::array({json{{"domain_id", "a"}, {"text", "x"}}})}};
  EXPECT_EQ(payload_digest(a), payload_digest(b));
}

TEST(ScriptedBackend, ExactMatchReturnsCannedQualityReport) {
  json payload = make_quality_payload("the query", "the seed answer");
  ScriptedBackend backend({exact_entry(AgentRole::QualityAssessor, payload,
                                       json{{"completeness", 0.70}, {"breadth", 0.65}})});
  AgentResponse response =
      backend.invoke(make_request(AgentRole::QualityAssessor,
                                  make_quality_payload("  The Query ", "the seed answer")));
  EXPECT_DOUBLE_EQ(response.body["completeness"].get<double>(), 0.70);
  EXPECT_DOUBLE_EQ(response.body["breadth"].get<double>(), 0.65);
}

TEST(ScriptedBackend, UnknownDigestWithoutWildcardIsNoScriptMatch) {
  ScriptedBackend backend({exact_entry(AgentRole::QualityAssessor,
                                       make_quality_payload("q", "known"),
                                       json{{"completeness", 0.5}, {"breadth", 0.5}})});
  try {
    backend.invoke(make_request(AgentRole::QualityAssessor, make_quality_payload("q", "other")));
    FAIL() << "expected NoScriptMatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoScriptMatch);
  }
}

TEST(ScriptedBackend, EmptyScriptRejectsEveryCall) {
  ScriptedBackend backend(std::vector<ScriptEntry>{});
  EXPECT_EQ(backend.entry_count(), 0u);
  try {
    backend.invoke(make_request(AgentRole::QualityAssessor, make_quality_payload("q", "a")));
    FAIL() << "expected NoScriptMatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoScriptMatch);
  }
}

TEST(ScriptedBackend, WildcardPerRoleAnswersEverything) {
  ScriptedBackend backend(testing::wildcard_script());
  for (const char* answer : {"a1", "a2", "a3"}) {
    AgentResponse r = backend.invoke(
        make_request(AgentRole::QualityAssessor, make_quality_payload("q", answer)));
    EXPECT_DOUBLE_EQ(r.body["completeness"].get<double>(), 0.4);
  }
  AgentResponse partial = backend.invoke(make_request(
      AgentRole::PartialGenerator,
      make_partial_payload("q", RetrievalMode::Global, json::array())));
  EXPECT_FALSE(partial.body["text"].get<std::string>().empty());
}

TEST(ScriptedBackend, ExactEntryWinsOverWildcard) {
  json payload = make_quality_payload("q", "special");
  std::vector<ScriptEntry> entries = {
      wildcard_entry(AgentRole::QualityAssessor,
                     json{{"completeness", 0.1}, {"breadth", 0.1}}),
      exact_entry(AgentRole::QualityAssessor, payload,
                  json{{"completeness", 0.9}, {"breadth", 0.9}}),
  };
  ScriptedBackend backend(entries);
  AgentResponse r = backend.invoke(make_request(AgentRole::QualityAssessor, payload));
  EXPECT_DOUBLE_EQ(r.body["completeness"].get<double>(), 0.9);
}

TEST(ScriptedBackend, DuplicateExactEntryRejected) {
  json payload = make_quality_payload("q", "a");
  std::vector<ScriptEntry> entries = {
      exact_entry(AgentRole::QualityAssessor, payload,
                  json{{"completeness", 0.1}, {"breadth", 0.1}}),
      exact_entry(AgentRole::QualityAssessor, payload,
                  json{{"completeness", 0.2}, {"breadth", 0.2}}),
  };
  try {
    ScriptedBackend backend(entries);
    FAIL() << "expected DuplicateEntry";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DuplicateEntry);
  }
}

TEST(ScriptedBackend, DuplicateWildcardRejected) {
  std::vector<ScriptEntry> entries = {
      wildcard_entry(AgentRole::Synthesizer, json{{"text", "a"}}),
      wildcard_entry(AgentRole::Synthesizer, json{{"text", "b"}}),
  };
  EXPECT_THROW(ScriptedBackend backend(entries), Error);
}

TEST(ScriptedBackend, DeterministicFunctionOfRoleAndDigest) {
  ScriptedBackend backend(testing::wildcard_script());
  json payload = make_quality_payload("Some Query", "some answer");
  json shuffled{{"answer", "some answer"}, {"query", "  some query  "}};
  AgentResponse a = backend.invoke(make_request(AgentRole::QualityAssessor, payload));
  AgentResponse b = backend.invoke(make_request(AgentRole::QualityAssessor, shuffled));
  EXPECT_EQ(a.body.dump(), b.body.dump());
  EXPECT_EQ(a.usage.tokens_out, b.usage.tokens_out);
}

TEST(ScriptedBackend, AutoTierDirectiveComputesCompositeAndCutoffs) {
  ScriptedBackend backend({wildcard_entry(AgentRole::RelevanceAssessor, json{{"tier", "auto"}})});
  auto invoke = [&](double s_sim, double s_rich, double s_hist) {
    return backend.invoke(make_request(
        AgentRole::RelevanceAssessor,
        make_relevance_payload("q", "dom", "summary", s_sim, s_rich, s_hist)));
  };
  // composite = 0.5*sim + 0.25*rich + 0.25*hist
  EXPECT_EQ(invoke(1.0, 1.0, 1.0).body["tier"], "HIGH");        // 1.0
  EXPECT_EQ(invoke(0.5, 0.5, 0.5).body["tier"], "MODERATE");    // 0.5
  EXPECT_EQ(invoke(0.3, 0.3, 0.5).body["tier"], "POTENTIAL");   // 0.35
  EXPECT_EQ(invoke(0.1, 0.1, 0.1).body["tier"], "IRRELEVANT");  // 0.1
  AgentResponse r = invoke(0.8, 0.4, 0.4);
  EXPECT_NEAR(r.body["score"].get<double>(), 0.6, 1e-12);
}

TEST(ScriptedBackend, SynthesizeDirectiveChainsOnPriorAnswer) {
  ScriptedBackend backend({wildcard_entry(
      AgentRole::Synthesizer,
      json{{"synthesize", json{{"base", "seed"}, {"append", " +x"}}}})});
  AgentResponse seed = backend.invoke(make_request(
      AgentRole::Synthesizer, make_synthesis_payload("q", std::nullopt, json::array())));
  EXPECT_EQ(seed.body["text"], "seed");
  AgentResponse fused = backend.invoke(make_request(
      AgentRole::Synthesizer, make_synthesis_payload("q", std::string("seed"), json::array())));
  EXPECT_EQ(fused.body["text"], "seed +x");
  AgentResponse fused2 = backend.invoke(make_request(
      AgentRole::Synthesizer,
      make_synthesis_payload("q", std::string("seed +x"), json::array())));
  EXPECT_EQ(fused2.body["text"], "seed +x +x");
}

TEST(ScriptedBackend, ElapsedAdvancesTheRunClock) {
  SimulatedClock clock;
  std::vector<ScriptEntry> entries = {
      wildcard_entry(AgentRole::PartialGenerator, json{{"text", "x"}}, 1500)};
  ScriptedBackend backend(entries, &clock);
  backend.invoke(make_request(AgentRole::PartialGenerator,
                              make_partial_payload("q", RetrievalMode::Local, json::array())));
  EXPECT_EQ(clock.now_ms(), 1500);
}

TEST(ScriptedBackend, InvalidCannedResponseIsSchemaViolation) {
  ScriptedBackend backend({wildcard_entry(AgentRole::QualityAssessor, json{{"bogus", 1}})});
  try {
    backend.invoke(make_request(AgentRole::QualityAssessor, make_quality_payload("q", "a")));
    FAIL() << "expected SchemaViolation";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SchemaViolation);
  }
}

TEST(ScriptFile, RoundTripAndLoad) {
  auto fx = testing::case_study_fixture();
  auto dir = std::filesystem::temp_directory_path() / "scout_script_roundtrip";
  std::filesystem::create_directories(dir);
  auto path = (dir / "script.json").string();
  {
    std::ofstream out(path);
    out << script_to_json(fx.entries).dump(2);
  }
  auto backend = load_script(path);
  EXPECT_EQ(backend->entry_count(), fx.entries.size());

  // A known exact entry still matches after the round trip.
  const DomainProfile& italy = fx.registry.domain("italy");
  SignalScores signals = compute_signals(fx.query, italy, fx.registry, 0.5);
  AgentResponse r = backend->invoke(make_request(
      AgentRole::RelevanceAssessor,
      make_relevance_payload(fx.query.text, italy.name, italy.summary_text, signals.s_sim,
                             signals.s_rich, signals.s_hist)));
  EXPECT_EQ(r.body["tier"], "HIGH");
  EXPECT_NEAR(r.body["score"].get<double>(), 0.539, 1e-12);
}

TEST(ScriptFile, NegativeUsageIsRejectedAtParse) {
  json doc{{"entries", json::array({json{{"role", "Synthesizer"},
                                         {"wildcard", true},
                                         {"response", json{{"text", "x"}}},
                                         {"tokens_in", -5}}})}};
  try {
    parse_script_json(doc, "inline");
    FAIL() << "expected ParseError";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
  }
}

TEST(ScriptFile, ParseErrorsAreReported) {
  auto dir = std::filesystem::temp_directory_path() / "scout_script_bad";
  std::filesystem::create_directories(dir);
  auto path = (dir / "bad.json").string();
  {
    std::ofstream out(path);
    out << "{ this is not json";
  }
  try {
    load_script(path);
    FAIL() << "expected ParseError";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
  }
  EXPECT_THROW(load_script("/nonexistent/script.json"), Error);
}

TEST(RequestValidation, PayloadKeySetsAreFixedPerRole) {
  json good = make_quality_payload("q", "a");
  EXPECT_NO_THROW(validate_request_payload(AgentRole::QualityAssessor, good));
  json extra = good;
  extra["surprise"] = 1;
  EXPECT_THROW(validate_request_payload(AgentRole::QualityAssessor, extra), Error);
  json missing{{"query", "q"}};
  EXPECT_THROW(validate_request_payload(AgentRole::QualityAssessor, missing), Error);
  // prior_answer is the one optional key.
  EXPECT_NO_THROW(validate_request_payload(
      AgentRole::Synthesizer, make_synthesis_payload("q", std::nullopt, json::array())));
  EXPECT_NO_THROW(validate_request_payload(
      AgentRole::Synthesizer, make_synthesis_payload("q", std::string("p"), json::array())));
}

}  // namespace
}  // namespace scout
