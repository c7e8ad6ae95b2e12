#include "debate/engine.hpp"

#include <algorithm>
#include <sstream>

#include "debate/fsio.hpp"
#include "debate/log.hpp"

namespace debate {

std::string build_opener(const ClaimRecord& claim) {
    std::string text;
    if (claim.topic.empty()) {
        log::warn("claim '" + claim.claim_id + "' has no topic; opener omits the topic line");
    } else {
        text += "Let's talk about this topic: \"" + claim.topic + "\"\n";
    }
    text += "claim: \"" + claim.claim + "\"\n";
    text += "reason: \"" + claim.reason + "\"\n";
    text += "Based on the my reason, I believe \"" + claim.claim +
            "\" is correct. What do you think?";
    return text;
}

namespace {

Summarizer make_summarizer(const DebateConfig& config) {
    if (config.summarizer_backend) {
        Backend* backend = config.summarizer_backend.get();
        RetryPolicy retry = config.summarizer_retry;
        return [backend, retry](const std::vector<ChatMessage>& messages) {
            return summarize_messages(*backend, messages, retry);
        };
    }
    return [](const std::vector<ChatMessage>&) -> std::string {
        throw BudgetInfeasible(
            "transcript exceeds the token budget and no summarizer backend is configured");
    };
}

void check_config(const DebateConfig& config) {
    if (config.max_rounds < 1) throw ConfigError("max_rounds must be >= 1");
    bool needs_helper = config.scenario != ScenarioKind::NoHelper;
    if (needs_helper && !config.persuader.helper) {
        throw ConfigError(to_string(config.scenario) + " scenario requires a helper agent");
    }
    if (!needs_helper && config.persuader.helper) {
        throw ConfigError("NoHelper scenario must not carry a helper agent");
    }
    if (!config.persuader.backend || !config.debater.backend) {
        throw ConfigError("persuader and debater backends are required");
    }
}

std::map<std::string, std::string> collect_model_ids(const DebateConfig& config) {
    std::map<std::string, std::string> ids;
    ids["persuader"] = config.persuader.backend->id();
    ids["debater"] = config.debater.backend->id();
    if (config.persuader.helper && config.persuader.helper->backend) {
        ids["helper"] = config.persuader.helper->backend->id();
    }
    const Moderator& moderator = config.moderator;
    if (moderator.convinced_backend) ids["moderator_convinced"] = moderator.convinced_backend->id();
    if (moderator.topic_backend) ids["moderator_topic"] = moderator.topic_backend->id();
    if (moderator.pleasantry_backend) {
        ids["moderator_pleasantry"] = moderator.pleasantry_backend->id();
    }
    if (moderator.fallback) ids["moderator_fallback"] = moderator.fallback->id();
    if (config.summarizer_backend) ids["summarizer"] = config.summarizer_backend->id();
    return ids;
}

}  // namespace

DebateOutcome run_debate(const ClaimRecord& claim, DebateConfig& config, int repetition) {
    auto claim_report = validate_claim_record(claim);
    if (!claim_report.ok()) {
        throw ValidationError("cannot debate invalid claim: " + claim_report.violations.front());
    }
    if (repetition < 0) throw ValidationError("repetition must be >= 0");
    check_config(config);

    prepare_agent(config.persuader, claim);
    prepare_agent(config.debater, claim);
    Summarizer summarizer = make_summarizer(config);

    Transcript transcript;
    transcript.claim_id = claim.claim_id;
    transcript.scenario = config.scenario;
    transcript.repetition = repetition;

    DebateResult result;
    result.claim_id = claim.claim_id;
    result.scenario = config.scenario;
    result.repetition = repetition;
    result.model_ids = collect_model_ids(config);
    result.transcript_ref = transcript_file_name(claim.claim_id, config.scenario, repetition);

    TerminationReason termination = TerminationReason::BackendFailure;
    Stance final_stance = Stance::Unknown;
    int exchanges = 0;

    try {
        for (int round = 1; round <= config.max_rounds; ++round) {
            transcript.messages.push_back(
                persuader_turn(config.persuader, claim, transcript, config.scenario, summarizer));
            transcript.messages.push_back(
                debater_turn(config.debater, transcript, summarizer));
            exchanges = round;

            auto verdicts =
                run_subordinate_checks(config.moderator, claim, transcript, summarizer);
            auto decision = master_decision(verdicts, round, config.max_rounds);
            if (decision.action == DecisionAction::Terminate) {
                termination = *decision.reason;
                final_stance =
                    final_verdict(config.moderator, claim, transcript, termination, summarizer);
                break;
            }
        }
    } catch (const DebateFailure& e) {
        log::warn("debate " + claim.claim_id + "." + to_string(config.scenario) + "." +
                  std::to_string(repetition) + " ended by backend failure: " + e.what());
        termination = TerminationReason::BackendFailure;
        final_stance = Stance::Unknown;
    }

    result.rounds_completed = std::max(1, exchanges);
    result.termination = termination;
    result.final_stance = final_stance;
    result.initial_stance =
        infer_initial_stance(result.rounds_completed, termination, final_stance);
    result.total_tokens = 0;
    for (const auto& message : transcript.messages) result.total_tokens += message.token_count;

    return DebateOutcome{result, transcript};
}

// ---------------------------------------------------------------------------
// Transcript persistence
// ---------------------------------------------------------------------------

std::string transcript_file_name(const std::string& claim_id, ScenarioKind scenario,
                                 int repetition) {
    std::string id = claim_id;
    for (char& c : id) {
        if (c == '/' || c == '\\' || c == ' ' || c == '\t') c = '-';
    }
    return id + "." + to_string(scenario) + "." + std::to_string(repetition) + ".jsonl";
}

void write_transcript_file(const std::filesystem::path& path, const TranscriptFile& file) {
    nlohmann::json meta{
        {"type", "meta"},
        {"claim_id", file.transcript.claim_id},
        {"scenario", to_string(file.transcript.scenario)},
        {"repetition", file.transcript.repetition},
        {"topic", file.topic},
        {"claim", file.claim},
        {"reason", file.reason},
        {"model_ids", file.model_ids},
    };
    if (file.transcript.summary_note) meta["summary_note"] = *file.transcript.summary_note;

    std::ostringstream out;
    out << meta.dump() << "\n";
    for (const auto& message : file.transcript.messages) {
        out << nlohmann::json(message).dump() << "\n";
    }
    write_file_atomic(path, out.str());
}

TranscriptFile read_transcript_file(const std::filesystem::path& path) {
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line)) throw ParseError("transcript " + path.string() + " is empty");

    TranscriptFile file;
    try {
        nlohmann::json meta = nlohmann::json::parse(line);
        if (meta.value("type", "") != "meta") {
            throw ParseError("transcript " + path.string() + " does not start with a meta line");
        }
        file.transcript.claim_id = meta.at("claim_id").get<std::string>();
        file.transcript.scenario = scenario_from_string(meta.at("scenario").get<std::string>());
        file.transcript.repetition = meta.at("repetition").get<int>();
        file.topic = meta.value("topic", "");
        file.claim = meta.value("claim", "");
        file.reason = meta.value("reason", "");
        if (meta.contains("model_ids")) meta.at("model_ids").get_to(file.model_ids);
        if (meta.contains("summary_note")) {
            file.transcript.summary_note = meta.at("summary_note").get<std::string>();
        }
        int line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            file.transcript.messages.push_back(
                nlohmann::json::parse(line).get<ChatMessage>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("transcript " + path.string() + ": " + e.what());
    }
    return file;
}

}  // namespace debate
