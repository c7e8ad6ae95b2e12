#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <unistd.h>

#include "debate/engine.hpp"
#include "debate/fsio.hpp"
#include "debate/runner.hpp"

namespace testsupport {

// Scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        dir_ = std::filesystem::temp_directory_path() /
               ("debatebench-" + tag + "-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter++));
        std::filesystem::create_directories(dir_);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(dir_, ec);
    }
    const std::filesystem::path& path() const { return dir_; }

private:
    std::filesystem::path dir_;
};

inline debate::RetryPolicy fast_retry() {
    debate::RetryPolicy retry;
    retry.initial_backoff = std::chrono::milliseconds(0);
    return retry;
}

inline debate::BackendConfig scripted(std::string id, std::vector<std::string> lines,
                                      bool cycle = false) {
    debate::BackendConfig config;
    config.backend_id = std::move(id);
    config.kind = debate::BackendKind::Scripted;
    for (auto& line : lines) {
        config.script.push_back(debate::ScriptEntry{std::move(line), false, false});
    }
    config.cycle_script = cycle;
    return config;
}

inline debate::ClaimRecord sample_claim(const std::string& id = "mt-con") {
    debate::ClaimRecord claim;
    claim.claim_id = id;
    claim.topic = "Should Mother Teresa Be Canonized?";
    claim.claim = "Mother Teresa should not be canonized";
    claim.reason = "She didn't even give the dying aspirin, ...";
    claim.side = debate::ClaimSide::Con;
    claim.pair_id = "mt";
    return claim;
}

inline std::vector<debate::ClaimRecord> sample_claims(int pairs) {
    std::vector<debate::ClaimRecord> claims;
    for (int i = 1; i <= pairs; ++i) {
        std::string pair_id = "p" + std::to_string(i);
        debate::ClaimRecord pro;
        pro.claim_id = pair_id + "-pro";
        pro.topic = "Topic " + std::to_string(i) + "?";
        pro.claim = "Claim " + std::to_string(i) + " holds";
        pro.reason = "Reason " + std::to_string(i) + " pro";
        pro.side = debate::ClaimSide::Pro;
        pro.pair_id = pair_id;
        debate::ClaimRecord con = pro;
        con.claim_id = pair_id + "-con";
        con.claim = "Claim " + std::to_string(i) + " does not hold";
        con.reason = "Reason " + std::to_string(i) + " con";
        con.side = debate::ClaimSide::Con;
        claims.push_back(std::move(pro));
        claims.push_back(std::move(con));
    }
    return claims;
}

inline std::string write_claims_file(const std::filesystem::path& dir, int pairs) {
    std::string lines;
    for (const auto& claim : sample_claims(pairs)) {
        lines += nlohmann::json(claim).dump() + "\n";
    }
    std::filesystem::path file = dir / "claims.jsonl";
    debate::write_file_atomic(file, lines);
    return file.string();
}

inline debate::AgentConfig make_agent(debate::TemplateRole role, debate::BackendConfig backend) {
    debate::AgentConfig agent;
    agent.role = role;
    agent.backend = debate::make_backend(backend);
    agent.prompt = debate::default_template(role);
    agent.retry = fast_retry();
    return agent;
}

// Scripts for one debate: the persuader concedes nothing, the debater agrees
// at round `convinced_round` (0 = never), the moderators track that.
struct DebateScripts {
    debate::ScenarioKind scenario = debate::ScenarioKind::NoHelper;
    int convinced_round = 3;
    int max_rounds = 10;
};

// Fallacy names cycle through the taxonomy so multi-round debates exercise
// several labels.
inline std::string fallacy_for_round(int round) {
    const auto& taxonomy = debate::fallacy_taxonomy();
    return taxonomy[static_cast<std::size_t>(round) % taxonomy.size()];
}

inline std::string draft_marker(int round) { return "draftmark" + std::to_string(round); }
inline std::string revision_marker(int round) { return "revmark" + std::to_string(round); }

inline debate::DebateConfig make_debate_config(const DebateScripts& scripts) {
    using debate::ScenarioKind;
    using debate::TemplateRole;

    std::vector<std::string> persuader_lines;
    std::vector<std::string> helper_lines;
    std::vector<std::string> debater_lines;
    std::vector<std::string> convinced_lines;
    for (int round = 1; round <= scripts.max_rounds; ++round) {
        bool convinced = round == scripts.convinced_round;
        if (round >= 2) {
            persuader_lines.push_back("persuader point " + std::to_string(round) + " " +
                                      draft_marker(round));
            std::string revision = "revised point " + std::to_string(round) + " " +
                                   revision_marker(round);
            if (scripts.scenario == ScenarioKind::FallaciousHelper) {
                helper_lines.push_back("FALLACY: " + fallacy_for_round(round) +
                                       "\nARGUMENT: " + revision);
            } else if (scripts.scenario == ScenarioKind::LogicalHelper) {
                helper_lines.push_back("ARGUMENT: " + revision);
            }
        }
        debater_lines.push_back(convinced
                                    ? "You are right. I agree with the claim now."
                                    : "I disagree; reply " + std::to_string(round) +
                                          " still stands against the claim.");
        convinced_lines.push_back(convinced ? "YES" : "NO");
    }

    debate::DebateConfig config;
    config.scenario = scripts.scenario;
    config.max_rounds = scripts.max_rounds;
    config.persuader = make_agent(TemplateRole::Persuader, scripted("sp", persuader_lines));
    if (scripts.scenario == ScenarioKind::FallaciousHelper) {
        config.persuader.helper = std::make_shared<debate::AgentConfig>(
            make_agent(TemplateRole::FallaciousHelper, scripted("sf", helper_lines)));
    } else if (scripts.scenario == ScenarioKind::LogicalHelper) {
        config.persuader.helper = std::make_shared<debate::AgentConfig>(
            make_agent(TemplateRole::LogicalHelper, scripted("sl", helper_lines)));
    }
    config.debater = make_agent(TemplateRole::Debater, scripted("sd", debater_lines));

    config.moderator.convinced_backend = debate::make_backend(scripted("smc", convinced_lines));
    config.moderator.topic_backend = debate::make_backend(scripted("smt", {"YES"}, true));
    config.moderator.pleasantry_backend = debate::make_backend(scripted("smp", {"NO"}, true));
    config.moderator.convinced_prompt =
        debate::default_template(TemplateRole::ModeratorConvinced);
    config.moderator.topic_prompt = debate::default_template(TemplateRole::ModeratorTopic);
    config.moderator.pleasantry_prompt =
        debate::default_template(TemplateRole::ModeratorPleasantry);
    config.moderator.retry = fast_retry();
    return config;
}

// Factory for matrix runs: every debate of a scenario replays the same
// scripts, so reruns are byte-identical.
inline debate::DebateConfigFactory matrix_factory(int convinced_round = 3, int max_rounds = 10) {
    return [convinced_round, max_rounds](debate::ScenarioKind scenario) {
        DebateScripts scripts;
        scripts.scenario = scenario;
        scripts.convinced_round = convinced_round;
        scripts.max_rounds = max_rounds;
        return make_debate_config(scripts);
    };
}

// Forwards to an inner backend, keeping every request for inspection.
class RecordingBackend : public debate::Backend {
public:
    RecordingBackend(std::shared_ptr<debate::Backend> inner,
                     std::shared_ptr<std::vector<debate::CompletionRequest>> log)
        : inner_(std::move(inner)), log_(std::move(log)) {}

    debate::CompletionResponse complete(const debate::CompletionRequest& request) override {
        log_->push_back(request);
        return inner_->complete(request);
    }
    int count_tokens(const std::string& text) const override {
        return inner_->count_tokens(text);
    }
    const debate::BackendConfig& config() const override { return inner_->config(); }

private:
    std::shared_ptr<debate::Backend> inner_;
    std::shared_ptr<std::vector<debate::CompletionRequest>> log_;
};

}  // namespace testsupport
