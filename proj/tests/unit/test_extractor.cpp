#include <doctest.h>

#include "debate/extractor.hpp"
#include "support/fixtures.hpp"

using namespace debate;
using testsupport::TempDir;

namespace {

ExperimentPlan fallacious_plan(const TempDir& dir, int pairs, int repetitions) {
    ExperimentPlan plan;
    plan.dataset_path = testsupport::write_claims_file(dir.path(), pairs);
    plan.output_dir = (dir.path() / "out").string();
    plan.scenarios = {ScenarioKind::FallaciousHelper};
    plan.repetitions = repetitions;
    return plan;
}

ChatMessage msg(MessageAuthor author, std::string text, int round) {
    ChatMessage m;
    m.author = author;
    m.text = std::move(text);
    m.round_index = round;
    return m;
}

ArgumentPair sample_pair(const std::string& label) {
    ArgumentPair pair;
    pair.claim_id = "c1";
    pair.repetition = 1;
    pair.round_index = 2;
    pair.topic = "A Topic?";
    pair.claim = "the claim";
    pair.logical_text = "the plain draft";
    pair.fallacious_text = "the slanted rewrite";
    pair.fallacy_label = label;
    return pair;
}

}  // namespace

TEST_SUITE("extractor") {

TEST_CASE("verification status names round-trip") {
    for (auto status : {VerificationStatus::Confirmed, VerificationStatus::Mismatch,
                        VerificationStatus::Unknown}) {
        CHECK(verification_status_from_string(to_string(status)) == status);
    }
    CHECK_THROWS_AS(verification_status_from_string("Maybe"), ParseError);
}

TEST_CASE("argument pairs round-trip through JSON") {
    ArgumentPair pair = sample_pair("straw man");
    pair.texts_identical = false;

    nlohmann::json j = pair;
    CHECK(j.at("pair_key").at("claim_id") == "c1");
    CHECK_FALSE(j.contains("verifier_label"));
    ArgumentPair back = j.get<ArgumentPair>();
    CHECK(back.claim_id == pair.claim_id);
    CHECK(back.repetition == 1);
    CHECK(back.round_index == 2);
    CHECK(back.logical_text == pair.logical_text);
    CHECK(back.fallacious_text == pair.fallacious_text);
    CHECK(back.verified == VerificationStatus::Unknown);
    CHECK_FALSE(back.verifier_label.has_value());

    pair.verified = VerificationStatus::Mismatch;
    pair.verifier_label = "ad hominem";
    nlohmann::json j2 = pair;
    CHECK(j2.at("verifier_label") == "ad hominem");
    CHECK(j2.get<ArgumentPair>().verifier_label == std::optional<std::string>("ad hominem"));
}

TEST_CASE("extraction collects every revised persuader message") {
    TempDir dir("extract");
    ExperimentPlan plan = fallacious_plan(dir, 1, 2);
    plan.scenarios = {ScenarioKind::NoHelper, ScenarioKind::FallaciousHelper};
    run_matrix(plan, testsupport::matrix_factory(3, 10));

    ResultsStore store(plan.output_dir);
    auto pairs = extract_pairs(store);
    // Two claims x two repetitions, rounds 2 and 3 revised; openers and the
    // NoHelper debates contribute nothing.
    REQUIRE(pairs.size() == 8);
    for (const auto& pair : pairs) {
        CHECK(pair.round_index >= 2);
        CHECK(pair.logical_text.find(testsupport::draft_marker(pair.round_index)) !=
              std::string::npos);
        CHECK(pair.fallacious_text.find(testsupport::revision_marker(pair.round_index)) !=
              std::string::npos);
        CHECK(pair.fallacy_label == testsupport::fallacy_for_round(pair.round_index));
        CHECK_FALSE(pair.texts_identical);
        CHECK(pair.verified == VerificationStatus::Unknown);
        CHECK_FALSE(pair.topic.empty());
        CHECK_FALSE(pair.claim.empty());
    }
    CHECK(pairs[0].claim_id == "p1-con");
    CHECK(pairs[0].repetition == 0);
    CHECK(pairs[0].round_index == 2);
    CHECK(pairs[1].round_index == 3);
    CHECK(pairs[2].repetition == 1);
    CHECK(pairs[4].claim_id == "p1-pro");

    // Re-extraction is byte-identical.
    CHECK(pairs_to_jsonl(extract_pairs(store)) == pairs_to_jsonl(pairs));
}

TEST_CASE("repetitions order numerically, not lexically") {
    TempDir dir("extract-reps");
    ExperimentPlan plan = fallacious_plan(dir, 1, 11);
    run_matrix(plan, testsupport::matrix_factory(2, 10));

    ResultsStore store(plan.output_dir);
    auto pairs = extract_pairs(store);
    REQUIRE(pairs.size() == 22);  // one revised round per debate
    for (int rep = 0; rep <= 10; ++rep) {
        CHECK(pairs[static_cast<std::size_t>(rep)].claim_id == "p1-con");
        CHECK(pairs[static_cast<std::size_t>(rep)].repetition == rep);
    }
    CHECK(pairs[11].claim_id == "p1-pro");
    CHECK(pairs[11].repetition == 0);
}

TEST_CASE("extraction skips unlabeled revisions and flags unchanged ones") {
    TempDir dir("extract-edge");
    ResultsStore store(dir.path() / "out");
    ClaimRecord claim = testsupport::sample_claim("c1");

    Transcript t;
    t.claim_id = "c1";
    t.scenario = ScenarioKind::FallaciousHelper;
    t.messages.push_back(msg(MessageAuthor::Persuader, "opening", 1));
    t.messages.push_back(msg(MessageAuthor::Debater, "pushback", 1));
    ChatMessage unlabeled = msg(MessageAuthor::Persuader, "revised two", 2);
    unlabeled.draft_text = "draft two";
    t.messages.push_back(unlabeled);
    t.messages.push_back(msg(MessageAuthor::Debater, "more pushback", 2));
    ChatMessage unchanged = msg(MessageAuthor::Persuader, "same text", 3);
    unchanged.draft_text = "same text";
    unchanged.fallacy_label = "straw man";
    t.messages.push_back(unchanged);
    t.messages.push_back(msg(MessageAuthor::Debater, "final pushback", 3));

    DebateResult result;
    result.claim_id = "c1";
    result.scenario = ScenarioKind::FallaciousHelper;
    result.repetition = 0;
    result.rounds_completed = 3;
    result.termination = TerminationReason::RoundLimit;
    result.final_stance = Stance::Disagree;
    result.initial_stance = Stance::Disagree;
    result.transcript_ref = transcript_file_name("c1", result.scenario, 0);
    store.put(result, t, claim);

    auto pairs = extract_pairs(store);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].round_index == 3);
    CHECK(pairs[0].texts_identical);
    CHECK(pairs[0].fallacy_label == "straw man");
}

TEST_CASE("a store without fallacious debates yields no pairs") {
    TempDir dir("extract-none");
    ExperimentPlan plan = fallacious_plan(dir, 1, 1);
    plan.scenarios = {ScenarioKind::NoHelper, ScenarioKind::LogicalHelper};
    run_matrix(plan, testsupport::matrix_factory(3, 10));
    CHECK(extract_pairs(ResultsStore(plan.output_dir)).empty());
}

TEST_CASE("label verification classifies each pair independently") {
    std::vector<ArgumentPair> pairs;
    pairs.push_back(sample_pair("Strawman"));      // alias of the verifier's answer
    pairs.push_back(sample_pair("straw man"));     // verifier disagrees on-taxonomy
    pairs.push_back(sample_pair("straw man"));     // verifier refuses
    pairs.push_back(sample_pair("straw man"));     // verifier keeps timing out
    pairs.push_back(sample_pair("straw man"));     // verifier rambles off-taxonomy

    BackendConfig script;
    script.backend_id = "verifier";
    script.script = {
        ScriptEntry{"straw man", false, false},
        ScriptEntry{"Ad Hominem.", false, false},
        ScriptEntry{"", true, false},
        ScriptEntry{"", false, true},
        ScriptEntry{"", false, true},
        ScriptEntry{"", false, true},
        ScriptEntry{"no idea what this is", false, false},
    };
    auto verifier = testsupport::make_agent(TemplateRole::Verifier, script);

    auto verified = verify_labels(pairs, verifier);
    REQUIRE(verified.size() == 5);
    CHECK(verified[0].verified == VerificationStatus::Confirmed);
    CHECK_FALSE(verified[0].verifier_label.has_value());
    CHECK(verified[1].verified == VerificationStatus::Mismatch);
    CHECK(verified[1].verifier_label == std::optional<std::string>("ad hominem"));
    CHECK(verified[2].verified == VerificationStatus::Unknown);
    CHECK(verified[3].verified == VerificationStatus::Unknown);
    CHECK(verified[4].verified == VerificationStatus::Unknown);
    for (const auto& pair : verified) {
        CHECK(pair.logical_text == "the plain draft");
        CHECK(pair.fallacious_text == "the slanted rewrite");
    }
}

TEST_CASE("the verifier sees the rewrite under its own prompt") {
    auto log = std::make_shared<std::vector<CompletionRequest>>();
    auto verifier = testsupport::make_agent(TemplateRole::Verifier,
                                            testsupport::scripted("v", {"straw man"}));
    verifier.backend = std::make_shared<testsupport::RecordingBackend>(verifier.backend, log);

    ArgumentPair pair = sample_pair("straw man");
    verify_labels({pair}, verifier);

    REQUIRE(log->size() == 1);
    const auto& request = (*log)[0];
    ClaimRecord record;
    record.claim_id = pair.claim_id;
    record.topic = pair.topic;
    record.claim = pair.claim;
    CHECK(request.system_text == render_template(verifier.prompt, record));
    REQUIRE(request.turns.size() == 1);
    CHECK(request.turns[0] == std::pair{Speaker::Other, std::string("the slanted rewrite")});
}

TEST_CASE("verification requires a backend") {
    AgentConfig verifier;
    CHECK_THROWS_AS(verify_labels({}, verifier), ConfigError);
}

TEST_CASE("summaries and the pairs file") {
    std::vector<ArgumentPair> pairs;
    for (int i = 0; i < 4; ++i) pairs.push_back(sample_pair("straw man"));
    pairs[0].verified = VerificationStatus::Confirmed;
    pairs[1].verified = VerificationStatus::Confirmed;
    pairs[2].verified = VerificationStatus::Mismatch;
    pairs[2].verifier_label = "red herring";

    ExtractionSummary summary = summarize_pairs(pairs);
    CHECK(summary.pairs == 4);
    CHECK(summary.confirmed == 2);
    CHECK(summary.mismatched == 1);
    CHECK(summary.unknown == 1);
    CHECK(summary.confirmation_rate == 0.5);
    CHECK(summarize_pairs({}).confirmation_rate == 0.0);

    auto reloaded = pairs_from_jsonl(pairs_to_jsonl(pairs));
    REQUIRE(reloaded.size() == 4);
    CHECK(reloaded[2].verified == VerificationStatus::Mismatch);
    CHECK(reloaded[2].verifier_label == std::optional<std::string>("red herring"));
    CHECK(pairs_to_jsonl(reloaded) == pairs_to_jsonl(pairs));

    CHECK_THROWS_WITH_AS(pairs_from_jsonl("{}\nbroken"),
                         doctest::Contains("line 1"), ParseError);

    TempDir dir("pairs-file");
    ResultsStore store(dir.path() / "out");
    std::filesystem::path out_path = dir.path() / "out" / "pairs.jsonl";
    ExtractionSummary written = write_pairs_file(store, out_path, pairs);
    CHECK(written.pairs == 4);
    CHECK(read_file(out_path) == pairs_to_jsonl(pairs));
    CHECK(store.load_manifest().empty());  // the summary is a typed record
    CHECK(read_file(store.manifest_path()).find("\"type\":\"extraction_summary\"") !=
          std::string::npos);
}

}
