#include <doctest.h>

#include <sstream>

#include "debate/cli.hpp"
#include "debate/extractor.hpp"
#include "support/fixtures.hpp"

using namespace debate;
using testsupport::TempDir;

namespace {

nlohmann::json backend_json(const std::string& id, const std::vector<std::string>& lines,
                            bool cycle = false) {
    nlohmann::json script = nlohmann::json::array();
    for (const auto& line : lines) script.push_back({{"text", line}});
    nlohmann::json j{{"backend_id", id}, {"kind", "Scripted"}, {"script", script}};
    if (cycle) j["cycle"] = true;
    return j;
}

// A complete scripted configuration: the debater concedes in round three.
nlohmann::json config_json() {
    return nlohmann::json{
        {"dataset_path", "claims.jsonl"},
        {"output_dir", "out"},
        {"repetitions", 2},
        {"backends",
         {
             {"persuader", backend_json("sp", {"point two", "point three"})},
             {"debater", backend_json("sd", {"I disagree with that.", "Still not convinced.",
                                             "You are right. I agree now."})},
             {"fallacious_helper",
              backend_json("sf", {"FALLACY: straw man\nARGUMENT: revised two",
                                  "FALLACY: red herring\nARGUMENT: revised three"})},
             {"logical_helper",
              backend_json("sl", {"ARGUMENT: revised two", "ARGUMENT: revised three"})},
             {"moderator_convinced", backend_json("smc", {"NO", "NO", "YES"})},
             {"moderator_topic", backend_json("smt", {"YES"}, true)},
             {"moderator_pleasantry", backend_json("smp", {"NO"}, true)},
             {"verifier", backend_json("sv", {"straw man"}, true)},
         }},
    };
}

std::filesystem::path write_config(const TempDir& dir, nlohmann::json config) {
    testsupport::write_claims_file(dir.path(), 1);
    std::filesystem::path path = dir.path() / "run.json";
    write_file_atomic(path, config.dump(2) + "\n");
    return path;
}

int run_cli(std::vector<std::string> args, std::string* out_text = nullptr,
            std::string* err_text = nullptr) {
    std::ostringstream out;
    std::ostringstream err;
    int code = dispatch(std::move(args), out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return code;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config files resolve paths against their own directory") {
    TempDir dir("cli-config");
    nlohmann::json j = config_json();
    j["temperature"] = 0.7;
    j["max_output_tokens"] = 128;
    j["retry"] = {{"max_attempts", 2}, {"initial_backoff_ms", 1}, {"backoff_multiplier", 1.5}};
    std::filesystem::path path = write_config(dir, j);

    RunConfig config = load_run_config(path);
    CHECK(config.plan.dataset_path == (dir.path() / "claims.jsonl").string());
    CHECK(config.plan.output_dir == (dir.path() / "out").string());
    CHECK(config.plan.repetitions == 2);
    CHECK(config.plan.scenarios.size() == 3);
    CHECK(config.temperature == std::optional<double>(0.7));
    CHECK(config.max_output_tokens == 128);
    CHECK(config.retry.max_attempts == 2);
    CHECK(config.retry.initial_backoff == std::chrono::milliseconds(1));
    CHECK(config.retry.backoff_multiplier == 1.5);
    CHECK(config.backends.count("persuader") == 1);
    CHECK(config.backends.at("debater").script.size() == 3);
    CHECK_NOTHROW(validate_run_config(config));
}

TEST_CASE("backends can load their script from a separate file") {
    TempDir dir("cli-script-path");
    write_file_atomic(dir.path() / "lines.jsonl",
                      "{\"text\": \"hello\"}\n{\"text\": \"there\"}\n");
    nlohmann::json j = config_json();
    j["backends"]["persuader"] = {
        {"backend_id", "sp"}, {"kind", "Scripted"}, {"script_path", "lines.jsonl"}};
    RunConfig config = load_run_config(write_config(dir, j));
    REQUIRE(config.backends.at("persuader").script.size() == 2);
    CHECK(config.backends.at("persuader").script[1].text == "there");

    SUBCASE("an inline script plus a script file is ambiguous") {
        j["backends"]["persuader"]["script"] = {{{"text", "inline"}}};
        CHECK_THROWS_AS(load_run_config(write_config(dir, j)), ConfigError);
    }
}

TEST_CASE("config errors are configuration errors, not crashes") {
    TempDir dir("cli-bad-config");
    std::filesystem::path path = dir.path() / "run.json";

    write_file_atomic(path, "{ not json");
    CHECK_THROWS_AS(load_run_config(path), ConfigError);

    write_file_atomic(path, "{\"output_dir\": \"out\"}");
    CHECK_THROWS_AS(load_run_config(path), ConfigError);  // dataset_path missing

    nlohmann::json j = config_json();
    j["backends"]["persuader"]["kind"] = "Telepathic";
    write_file_atomic(path, j.dump());
    CHECK_THROWS_AS(load_run_config(path), ConfigError);
}

TEST_CASE("run config validation matches scenarios to helper roles") {
    TempDir dir("cli-validate-config");
    nlohmann::json j = config_json();
    j["backends"].erase("fallacious_helper");
    RunConfig config = load_run_config(write_config(dir, j));
    CHECK_THROWS_WITH_AS(validate_run_config(config),
                         doctest::Contains("fallacious_helper"), ConfigError);

    config.plan.scenarios = {ScenarioKind::NoHelper, ScenarioKind::LogicalHelper};
    CHECK_NOTHROW(validate_run_config(config));
}

TEST_CASE("the factory builds fresh scripted backends per debate") {
    TempDir dir("cli-factory");
    RunConfig config = load_run_config(write_config(dir, config_json()));
    DebateConfigFactory factory = make_factory(config);

    DebateConfig first = factory(ScenarioKind::FallaciousHelper);
    CHECK(first.persuader.backend->id() == "sp");
    REQUIRE(first.persuader.helper != nullptr);
    CHECK(first.persuader.helper->role == TemplateRole::FallaciousHelper);
    CHECK(first.max_rounds == config.plan.max_rounds);
    CHECK(first.debater.backend->id() == "sd");
    CHECK(factory(ScenarioKind::NoHelper).persuader.helper == nullptr);

    // Same claim, two configs: byte-identical replays.
    ClaimRecord claim = testsupport::sample_claim();
    DebateConfig second = factory(ScenarioKind::FallaciousHelper);
    DebateOutcome a = run_debate(claim, first, 0);
    DebateOutcome b = run_debate(claim, second, 0);
    REQUIRE(a.transcript.messages.size() == b.transcript.messages.size());
    for (std::size_t i = 0; i < a.transcript.messages.size(); ++i) {
        CHECK(a.transcript.messages[i].text == b.transcript.messages[i].text);
    }
    CHECK(a.result.rounds_completed == 3);
}

TEST_CASE("help lists every command and flag") {
    std::string out;
    std::string err;
    CHECK(run_cli({"--help"}, &out, &err) == 0);
    for (const char* word : {"debatebench", "run", "analyze", "extract", "validate"}) {
        CAPTURE(word);
        CHECK(out.find(word) != std::string::npos);
    }
    CHECK(out == read_file(std::filesystem::path(TEST_DATA_DIR) / "golden" / "help.txt"));

    CHECK(run_cli({"run", "--help"}, &out, &err) == 0);
    for (const char* flag : {"--config", "--out", "--scenarios", "--repetitions",
                             "--concurrency", "--max-rounds", "--seed", "--dry-run"}) {
        CAPTURE(flag);
        CHECK(out.find(flag) != std::string::npos);
    }
    CHECK(run_cli({"analyze", "--help"}, &out, &err) == 0);
    CHECK(out.find("--out") != std::string::npos);
    CHECK(run_cli({"extract", "--help"}, &out, &err) == 0);
    CHECK(out.find("--config") != std::string::npos);
    CHECK(out.find("--out") != std::string::npos);
}

TEST_CASE("usage errors") {
    std::string out;
    std::string err;
    CHECK(run_cli({}, &out, &err) == 2);
    CHECK(run_cli({"frobnicate"}, &out, &err) == 2);
    CHECK(run_cli({"run", "--no-such-flag"}, &out, &err) == 2);
    CHECK(run_cli({"run"}, &out, &err) == 2);  // --config is required
}

TEST_CASE("validate checks a dataset file") {
    TempDir dir("cli-validate");
    std::string dataset = testsupport::write_claims_file(dir.path(), 2);

    std::string out;
    CHECK(run_cli({"validate", dataset}, &out) == 0);
    CHECK(out == "dataset OK: 4 claims, 2 pro/con pairs\n");

    auto records = testsupport::sample_claims(1);
    records[1].claim_id = records[0].claim_id;
    std::string lines;
    for (const auto& r : records) lines += claim_to_line(r) + "\n";
    write_file_atomic(dir.path() / "dup.jsonl", lines);
    std::string err;
    CHECK(run_cli({"validate", (dir.path() / "dup.jsonl").string()}, &out, &err) == 1);
    CHECK(err.rfind("error: ", 0) == 0);

    CHECK(run_cli({"validate", (dir.path() / "absent.jsonl").string()}, &out, &err) == 1);
}

TEST_CASE("dry runs list the matrix without touching a backend") {
    TempDir dir("cli-dry");
    nlohmann::json j = config_json();
    // Empty scripts: any backend call would fail the run immediately.
    for (auto& [role, backend] : j.at("backends").items()) {
        (void)role;
        backend["script"] = nlohmann::json::array();
        backend.erase("cycle");
    }
    std::filesystem::path config = write_config(dir, j);

    std::string out;
    CHECK(run_cli({"run", "--config", config.string(), "--dry-run"}, &out) == 0);
    CHECK(out.find("would run: p1-pro.NoHelper.0\n") == 0);
    CHECK(out.find("planned 12 debates, 12 to run, 0 already stored\n") != std::string::npos);
    CHECK(ResultsStore(dir.path() / "out").size() == 0);
}

TEST_CASE("run, resume, analyze, and extract work end to end") {
    TempDir dir("cli-e2e");
    std::filesystem::path config = write_config(dir, config_json());
    std::filesystem::path store_dir = dir.path() / "out";

    std::string out;
    std::string err;
    REQUIRE(run_cli({"run", "--config", config.string()}, &out, &err) == 0);
    CHECK(out.find("executed 12 of 12 debates (0 already stored, 0 backend failures)") !=
          std::string::npos);
    CHECK(out.find("results in " + store_dir.string()) != std::string::npos);
    ResultsStore store(store_dir);
    CHECK(store.size() == 12);

    // The second run has nothing to do; a dry run confirms it.
    REQUIRE(run_cli({"run", "--config", config.string()}, &out) == 0);
    CHECK(out.find("executed 0 of 12 debates (12 already stored, 0 backend failures)") !=
          std::string::npos);
    REQUIRE(run_cli({"run", "--config", config.string(), "--dry-run"}, &out) == 0);
    CHECK(out.find("done: p1-pro.NoHelper.0\n") == 0);
    CHECK(out.find("planned 12 debates, 0 to run, 12 already stored\n") != std::string::npos);

    REQUIRE(run_cli({"analyze", store_dir.string()}, &out) == 0);
    CHECK(out.find("results analyzed: 12") != std::string::npos);
    CHECK(out.find("reports written to " + (store_dir / "analysis").string()) !=
          std::string::npos);
    CHECK(std::filesystem::exists(store_dir / "analysis" / "metrics.csv"));
    CHECK(std::filesystem::exists(store_dir / "analysis" / "per_claim.csv"));
    CHECK(std::filesystem::exists(store_dir / "analysis" / "plot_data.csv"));

    std::filesystem::path report_dir = dir.path() / "report";
    REQUIRE(run_cli({"analyze", store_dir.string(), "--out", report_dir.string()}, &out) == 0);
    CHECK(std::filesystem::exists(report_dir / "metrics.csv"));

    // Extraction without a verifier leaves every label unverified.
    REQUIRE(run_cli({"extract", store_dir.string()}, &out) == 0);
    CHECK(out.find("extracted 8 argument pairs (confirmed 0, mismatched 0, unknown 8)") !=
          std::string::npos);
    auto unverified = pairs_from_jsonl(read_file(store_dir / "pairs.jsonl"));
    CHECK(unverified.size() == 8);

    // With the verifier: round-two labels match its answer, round-three don't.
    REQUIRE(run_cli({"extract", store_dir.string(), "--config", config.string()}, &out) == 0);
    CHECK(out.find("extracted 8 argument pairs (confirmed 4, mismatched 4, unknown 0)") !=
          std::string::npos);
    auto verified = pairs_from_jsonl(read_file(store_dir / "pairs.jsonl"));
    REQUIRE(verified.size() == 8);
    for (const auto& pair : verified) {
        if (pair.round_index == 2) {
            CHECK(pair.verified == VerificationStatus::Confirmed);
        } else {
            CHECK(pair.verified == VerificationStatus::Mismatch);
            CHECK(pair.verifier_label == std::optional<std::string>("straw man"));
        }
    }
}

TEST_CASE("run flags override the config file") {
    TempDir dir("cli-overrides");
    std::filesystem::path config = write_config(dir, config_json());
    std::filesystem::path other_out = dir.path() / "elsewhere";

    std::string out;
    REQUIRE(run_cli({"run", "--config", config.string(), "--out", other_out.string(),
                     "--scenarios", "NoHelper", "--repetitions", "1"},
                    &out) == 0);
    CHECK(out.find("executed 2 of 2 debates") != std::string::npos);
    ResultsStore store(other_out);
    CHECK(store.size() == 2);
    for (const auto& result : store.load_all()) {
        CHECK(result.scenario == ScenarioKind::NoHelper);
        CHECK(result.repetition == 0);
    }

    std::string err;
    CHECK(run_cli({"run", "--config", config.string(), "--scenarios", "NopeHelper"}, &out,
                  &err) == 2);
    CHECK(err.rfind("configuration error: ", 0) == 0);
}

TEST_CASE("failures map onto exit codes") {
    TempDir dir("cli-exit");
    std::string out;
    std::string err;

    // Missing store directory: configuration error.
    CHECK(run_cli({"analyze", (dir.path() / "nowhere").string()}, &out, &err) == 2);
    CHECK(err.rfind("configuration error: ", 0) == 0);

    // Existing but empty store: an analysis failure.
    ResultsStore store(dir.path() / "empty");
    CHECK(run_cli({"analyze", (dir.path() / "empty").string()}, &out, &err) == 1);
    CHECK(err.rfind("error: ", 0) == 0);

    // Extraction with a config that lacks a verifier backend.
    nlohmann::json j = config_json();
    j["backends"].erase("verifier");
    std::filesystem::path config = write_config(dir, j);
    CHECK(run_cli({"extract", (dir.path() / "empty").string(), "--config", config.string()},
                  &out, &err) == 2);
    CHECK(err.find("config has no verifier backend") != std::string::npos);
}

}
