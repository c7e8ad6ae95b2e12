#pragma once

#include <filesystem>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "debate/engine.hpp"
#include "debate/model.hpp"

namespace debate {

struct ExperimentPlan {
    std::string dataset_path;
    std::vector<ScenarioKind> scenarios{std::begin(kAllScenarios), std::end(kAllScenarios)};
    int repetitions = 3;
    int concurrency_limit = 1;
    std::string output_dir;
    int max_rounds = 10;
    // Recorded for reproducibility; scripted runs are deterministic anyway.
    unsigned int seed = 0;
};

void to_json(nlohmann::json& j, const ExperimentPlan& plan);
void from_json(const nlohmann::json& j, ExperimentPlan& plan);

// Throws ConfigError on an unusable plan.
void validate_plan(const ExperimentPlan& plan);

// Parses, validates per-record invariants, and verifies every pair_id holds
// exactly one Pro and one Con claim.
std::vector<ClaimRecord> load_claims(const std::filesystem::path& path);

// Disk layout under root: results/<key>.json, transcripts/<key>.jsonl,
// manifest.jsonl. A result file is written only after its transcript, so a
// key is present iff its debate fully completed; resume re-runs the rest.
class ResultsStore {
public:
    explicit ResultsStore(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }

    static std::string key(const std::string& claim_id, ScenarioKind scenario, int repetition);
    static std::string key(const DebateResult& result);

    bool contains(const std::string& key) const;
    std::size_t size() const;

    // Atomic (write-temp-then-rename) and safe for concurrent workers.
    void put(const DebateResult& result, const Transcript& transcript, const ClaimRecord& claim);

    DebateResult load(const std::string& key) const;
    // Every stored result, ordered by key.
    std::vector<DebateResult> load_all() const;

    std::filesystem::path result_path(const std::string& key) const;
    std::filesystem::path transcript_path(const std::string& key) const;
    std::filesystem::path manifest_path() const;

    // Rewrites manifest.jsonl with one result line per key, in the order
    // given; a fully scripted rerun reproduces it byte for byte.
    void write_manifest(const std::vector<std::string>& ordered_keys) const;
    // Adds a non-result record (e.g. an extraction summary) to the manifest.
    void append_manifest_record(const nlohmann::json& record) const;
    // Result lines from the manifest, skipping typed records.
    std::vector<DebateResult> load_manifest() const;

private:
    std::filesystem::path root_;
    mutable std::mutex mutex_;
};

// Builds the per-debate configuration; invoked once per debate so scripted
// cursors start fresh and replays are identical.
using DebateConfigFactory = std::function<DebateConfig(ScenarioKind)>;

struct RunStats {
    int planned = 0;
    int executed = 0;
    int skipped = 0;
    // Debates recorded with BackendFailure termination.
    int failed = 0;
};

// Runs the claims x scenarios x repetitions matrix with at most
// concurrency_limit debates in flight, skipping keys already in the store,
// then rewrites the manifest in matrix order.
RunStats run_matrix(const ExperimentPlan& plan, const DebateConfigFactory& factory);

}  // namespace debate
