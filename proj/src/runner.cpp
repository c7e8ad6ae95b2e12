#include "debate/runner.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <sstream>
#include <thread>

#include "debate/fsio.hpp"
#include "debate/log.hpp"

namespace debate {

void to_json(nlohmann::json& j, const ExperimentPlan& plan) {
    nlohmann::json scenarios = nlohmann::json::array();
    for (auto scenario : plan.scenarios) scenarios.push_back(to_string(scenario));
    j = nlohmann::json{
        {"dataset_path", plan.dataset_path},
        {"scenarios", std::move(scenarios)},
        {"repetitions", plan.repetitions},
        {"concurrency_limit", plan.concurrency_limit},
        {"output_dir", plan.output_dir},
        {"max_rounds", plan.max_rounds},
        {"seed", plan.seed},
    };
}

void from_json(const nlohmann::json& j, ExperimentPlan& plan) {
    plan.dataset_path = j.at("dataset_path").get<std::string>();
    if (j.contains("scenarios")) {
        plan.scenarios.clear();
        for (const auto& name : j.at("scenarios")) {
            plan.scenarios.push_back(scenario_from_string(name.get<std::string>()));
        }
    }
    plan.repetitions = j.value("repetitions", 3);
    plan.concurrency_limit = j.value("concurrency_limit", 1);
    plan.output_dir = j.at("output_dir").get<std::string>();
    plan.max_rounds = j.value("max_rounds", 10);
    plan.seed = j.value("seed", 0u);
}

void validate_plan(const ExperimentPlan& plan) {
    if (plan.dataset_path.empty()) throw ConfigError("plan has no dataset_path");
    if (plan.output_dir.empty()) throw ConfigError("plan has no output_dir");
    if (plan.scenarios.empty()) throw ConfigError("plan selects no scenarios");
    if (plan.repetitions < 1) throw ConfigError("repetitions must be >= 1");
    if (plan.concurrency_limit < 1) throw ConfigError("concurrency_limit must be >= 1");
    if (plan.max_rounds < 1) throw ConfigError("max_rounds must be >= 1");
    std::vector<ScenarioKind> seen;
    for (auto scenario : plan.scenarios) {
        if (std::find(seen.begin(), seen.end(), scenario) != seen.end()) {
            throw ConfigError("scenario " + to_string(scenario) + " listed twice");
        }
        seen.push_back(scenario);
    }
}

std::vector<ClaimRecord> load_claims(const std::filesystem::path& path) {
    auto records = parse_claim_lines(read_file(path));
    auto report = validate_claim_dataset(records);
    if (!report.ok()) {
        std::string what = "claim dataset " + path.string() + " is invalid:";
        for (const auto& violation : report.violations) what += "\n  " + violation;
        throw ValidationError(what);
    }
    return records;
}

// ---------------------------------------------------------------------------
// ResultsStore
// ---------------------------------------------------------------------------

ResultsStore::ResultsStore(std::filesystem::path root) : root_(std::move(root)) {
    std::error_code ec;
    std::filesystem::create_directories(root_ / "results", ec);
    if (!ec) std::filesystem::create_directories(root_ / "transcripts", ec);
    if (ec) throw IoError("cannot create store under " + root_.string() + ": " + ec.message());
}

std::string ResultsStore::key(const std::string& claim_id, ScenarioKind scenario,
                              int repetition) {
    std::string id = claim_id;
    for (char& c : id) {
        if (c == '/' || c == '\\' || c == ' ' || c == '\t') c = '-';
    }
    return id + "." + to_string(scenario) + "." + std::to_string(repetition);
}

std::string ResultsStore::key(const DebateResult& result) {
    return key(result.claim_id, result.scenario, result.repetition);
}

std::filesystem::path ResultsStore::result_path(const std::string& key) const {
    return root_ / "results" / (key + ".json");
}

std::filesystem::path ResultsStore::transcript_path(const std::string& key) const {
    return root_ / "transcripts" / (key + ".jsonl");
}

std::filesystem::path ResultsStore::manifest_path() const { return root_ / "manifest.jsonl"; }

bool ResultsStore::contains(const std::string& key) const {
    return std::filesystem::exists(result_path(key));
}

std::size_t ResultsStore::size() const {
    std::size_t count = 0;
    for (const auto& entry : std::filesystem::directory_iterator(root_ / "results")) {
        if (entry.path().extension() == ".json") ++count;
    }
    return count;
}

void ResultsStore::put(const DebateResult& result, const Transcript& transcript,
                       const ClaimRecord& claim) {
    std::string k = key(result);

    TranscriptFile file;
    file.transcript = transcript;
    file.topic = claim.topic;
    file.claim = claim.claim;
    file.reason = claim.reason;
    file.model_ids = result.model_ids;
    // Transcript lands before the result file: the result's existence marks
    // the debate complete for resume purposes.
    write_transcript_file(transcript_path(k), file);
    write_file_atomic(result_path(k), nlohmann::json(result).dump() + "\n");
}

DebateResult ResultsStore::load(const std::string& key) const {
    try {
        return nlohmann::json::parse(read_file(result_path(key))).get<DebateResult>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("result " + key + ": " + e.what());
    }
}

std::vector<DebateResult> ResultsStore::load_all() const {
    std::vector<std::string> keys;
    for (const auto& entry : std::filesystem::directory_iterator(root_ / "results")) {
        if (entry.path().extension() == ".json") keys.push_back(entry.path().stem().string());
    }
    std::sort(keys.begin(), keys.end());
    std::vector<DebateResult> results;
    results.reserve(keys.size());
    for (const auto& k : keys) results.push_back(load(k));
    return results;
}

void ResultsStore::write_manifest(const std::vector<std::string>& ordered_keys) const {
    std::ostringstream out;
    for (const auto& k : ordered_keys) {
        if (!contains(k)) continue;
        out << nlohmann::json(load(k)).dump() << "\n";
    }
    std::lock_guard<std::mutex> lock(mutex_);
    write_file_atomic(manifest_path(), out.str());
}

void ResultsStore::append_manifest_record(const nlohmann::json& record) const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::string content;
    if (std::filesystem::exists(manifest_path())) content = read_file(manifest_path());
    content += record.dump() + "\n";
    write_file_atomic(manifest_path(), content);
}

std::vector<DebateResult> ResultsStore::load_manifest() const {
    std::vector<DebateResult> results;
    std::istringstream in(read_file(manifest_path()));
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            nlohmann::json j = nlohmann::json::parse(line);
            if (j.contains("type")) continue;  // summary or other typed record
            results.push_back(j.get<DebateResult>());
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("manifest line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return results;
}

// ---------------------------------------------------------------------------
// Matrix execution
// ---------------------------------------------------------------------------

namespace {

struct Task {
    const ClaimRecord* claim;
    ScenarioKind scenario;
    int repetition;
    std::string key;
};

}  // namespace

RunStats run_matrix(const ExperimentPlan& plan, const DebateConfigFactory& factory) {
    validate_plan(plan);
    if (!factory) throw ConfigError("run_matrix needs a debate config factory");
    auto claims = load_claims(plan.dataset_path);

    // Surface configuration problems before any debate starts.
    for (auto scenario : plan.scenarios) (void)factory(scenario);

    ResultsStore store(plan.output_dir);

    std::vector<std::string> ordered_keys;
    std::vector<Task> pending;
    RunStats stats;
    for (const auto& claim : claims) {
        for (auto scenario : plan.scenarios) {
            for (int rep = 0; rep < plan.repetitions; ++rep) {
                std::string key = ResultsStore::key(claim.claim_id, scenario, rep);
                ordered_keys.push_back(key);
                ++stats.planned;
                if (store.contains(key)) {
                    ++stats.skipped;
                } else {
                    pending.push_back(Task{&claim, scenario, rep, key});
                }
            }
        }
    }
    log::info("matrix: " + std::to_string(stats.planned) + " debates planned, " +
              std::to_string(pending.size()) + " to run, " + std::to_string(stats.skipped) +
              " already complete");

    std::atomic<std::size_t> next{0};
    std::atomic<int> executed{0};
    std::atomic<int> failed{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto worker = [&] {
        for (;;) {
            std::size_t index = next.fetch_add(1);
            if (index >= pending.size()) return;
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (first_error) return;
            }
            const Task& task = pending[index];
            try {
                DebateConfig config = factory(task.scenario);
                config.max_rounds = plan.max_rounds;
                auto outcome = run_debate(*task.claim, config, task.repetition);
                store.put(outcome.result, outcome.transcript, *task.claim);
                ++executed;
                if (outcome.result.termination == TerminationReason::BackendFailure) ++failed;
                log::info(task.key + ": " + to_string(outcome.result.termination) + " after " +
                          std::to_string(outcome.result.rounds_completed) + " rounds, " +
                          std::to_string(outcome.result.total_tokens) + " tokens");
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    std::size_t worker_count =
        std::min<std::size_t>(static_cast<std::size_t>(plan.concurrency_limit), pending.size());
    if (worker_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(worker_count);
        for (std::size_t i = 0; i < worker_count; ++i) threads.emplace_back(worker);
        for (auto& thread : threads) thread.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    stats.executed = executed.load();
    stats.failed = failed.load();
    store.write_manifest(ordered_keys);
    return stats;
}

}  // namespace debate
