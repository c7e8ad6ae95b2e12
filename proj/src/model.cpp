#include "debate/model.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace debate {

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

ValidationReport validate_claim_record(const ClaimRecord& record) {
    ValidationReport report;
    auto flag = [&](const std::string& what) {
        std::string who = record.claim_id.empty() ? "<missing id>" : record.claim_id;
        report.violations.push_back("claim '" + who + "': " + what);
    };
    if (record.claim_id.empty()) flag("claim_id empty");
    if (record.claim.empty()) flag("claim empty");
    if (record.reason.empty()) flag("reason empty");
    if (record.pair_id.empty()) flag("pair_id empty");
    return report;
}

ValidationReport validate_claim_dataset(const std::vector<ClaimRecord>& records) {
    ValidationReport report;
    if (records.empty()) {
        report.violations.push_back("no records");
        return report;
    }

    std::set<std::string> seen_ids;
    for (const auto& record : records) {
        auto item = validate_claim_record(record);
        report.violations.insert(report.violations.end(), item.violations.begin(),
                                 item.violations.end());
        if (!record.claim_id.empty() && !seen_ids.insert(record.claim_id).second) {
            report.violations.push_back("duplicate claim_id '" + record.claim_id + "'");
        }
    }

    // Every pair must consist of exactly one Pro and one Con claim.
    std::map<std::string, std::vector<const ClaimRecord*>> pairs;
    for (const auto& record : records) {
        if (!record.pair_id.empty()) pairs[record.pair_id].push_back(&record);
    }
    for (const auto& [pair_id, members] : pairs) {
        if (members.size() != 2) {
            report.violations.push_back("pair_id '" + pair_id + "': expected exactly 2 claims, found " +
                                        std::to_string(members.size()));
            continue;
        }
        if (members[0]->side == members[1]->side) {
            report.violations.push_back("pair_id '" + pair_id + "': both claims are " +
                                        to_string(members[0]->side));
        }
    }
    return report;
}

ValidationReport validate_transcript(const Transcript& transcript) {
    ValidationReport report;
    MessageAuthor expected = MessageAuthor::Persuader;
    bool saw_non_system = false;
    for (std::size_t i = 0; i < transcript.messages.size(); ++i) {
        const auto& message = transcript.messages[i];
        if (message.author == MessageAuthor::System) continue;
        if (!saw_non_system && message.author != MessageAuthor::Persuader) {
            report.violations.push_back("first non-system message authored by " +
                                        to_string(message.author) + ", expected Persuader");
        }
        saw_non_system = true;
        if (message.author != expected) {
            report.violations.push_back("message " + std::to_string(i) + " breaks alternation: got " +
                                        to_string(message.author) + ", expected " + to_string(expected));
        }
        expected = (message.author == MessageAuthor::Persuader) ? MessageAuthor::Debater
                                                                : MessageAuthor::Persuader;
    }
    return report;
}

std::string dialogue_digest(const std::vector<ChatMessage>& messages) {
    std::string digest;
    for (const auto& message : messages) {
        if (message.author == MessageAuthor::System) continue;
        if (!digest.empty()) digest += "\n";
        digest += to_string(message.author) + ": " + message.text;
    }
    return digest;
}

// ---------------------------------------------------------------------------
// Stance inference
// ---------------------------------------------------------------------------

Stance infer_initial_stance(int rounds_completed, TerminationReason termination,
                            Stance final_stance) {
    if (rounds_completed > 2) return Stance::Disagree;
    if (termination == TerminationReason::Convinced) return Stance::Agree;
    if (final_stance == Stance::Disagree) return Stance::Disagree;
    return Stance::Unknown;
}

// ---------------------------------------------------------------------------
// Enum names
// ---------------------------------------------------------------------------

std::string to_string(ClaimSide side) {
    return side == ClaimSide::Pro ? "Pro" : "Con";
}

std::string to_string(ScenarioKind scenario) {
    switch (scenario) {
        case ScenarioKind::NoHelper: return "NoHelper";
        case ScenarioKind::FallaciousHelper: return "FallaciousHelper";
        case ScenarioKind::LogicalHelper: return "LogicalHelper";
    }
    return "NoHelper";
}

std::string to_string(MessageAuthor author) {
    switch (author) {
        case MessageAuthor::Persuader: return "Persuader";
        case MessageAuthor::Debater: return "Debater";
        case MessageAuthor::System: return "System";
    }
    return "System";
}

std::string to_string(Stance stance) {
    switch (stance) {
        case Stance::Agree: return "Agree";
        case Stance::Disagree: return "Disagree";
        case Stance::Unknown: return "Unknown";
    }
    return "Unknown";
}

std::string to_string(TerminationReason reason) {
    switch (reason) {
        case TerminationReason::Convinced: return "Convinced";
        case TerminationReason::RoundLimit: return "RoundLimit";
        case TerminationReason::OffTopic: return "OffTopic";
        case TerminationReason::PleasantryLoop: return "PleasantryLoop";
        case TerminationReason::BackendFailure: return "BackendFailure";
    }
    return "BackendFailure";
}

namespace {
[[noreturn]] void bad_name(const char* kind, const std::string& name) {
    throw ParseError(std::string("unknown ") + kind + " name: '" + name + "'");
}
}  // namespace

ClaimSide claim_side_from_string(const std::string& name) {
    if (name == "Pro") return ClaimSide::Pro;
    if (name == "Con") return ClaimSide::Con;
    bad_name("side", name);
}

ScenarioKind scenario_from_string(const std::string& name) {
    if (name == "NoHelper") return ScenarioKind::NoHelper;
    if (name == "FallaciousHelper") return ScenarioKind::FallaciousHelper;
    if (name == "LogicalHelper") return ScenarioKind::LogicalHelper;
    bad_name("scenario", name);
}

MessageAuthor author_from_string(const std::string& name) {
    if (name == "Persuader") return MessageAuthor::Persuader;
    if (name == "Debater") return MessageAuthor::Debater;
    if (name == "System") return MessageAuthor::System;
    bad_name("author", name);
}

Stance stance_from_string(const std::string& name) {
    if (name == "Agree") return Stance::Agree;
    if (name == "Disagree") return Stance::Disagree;
    if (name == "Unknown") return Stance::Unknown;
    bad_name("stance", name);
}

TerminationReason termination_from_string(const std::string& name) {
    if (name == "Convinced") return TerminationReason::Convinced;
    if (name == "RoundLimit") return TerminationReason::RoundLimit;
    if (name == "OffTopic") return TerminationReason::OffTopic;
    if (name == "PleasantryLoop") return TerminationReason::PleasantryLoop;
    if (name == "BackendFailure") return TerminationReason::BackendFailure;
    bad_name("termination", name);
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

void to_json(nlohmann::json& j, const ClaimRecord& record) {
    j = nlohmann::json{
        {"claim_id", record.claim_id}, {"topic", record.topic},
        {"claim", record.claim},       {"reason", record.reason},
        {"side", to_string(record.side)}, {"pair_id", record.pair_id},
    };
}

void from_json(const nlohmann::json& j, ClaimRecord& record) {
    j.at("claim_id").get_to(record.claim_id);
    j.at("topic").get_to(record.topic);
    j.at("claim").get_to(record.claim);
    j.at("reason").get_to(record.reason);
    record.side = claim_side_from_string(j.at("side").get<std::string>());
    j.at("pair_id").get_to(record.pair_id);
}

void to_json(nlohmann::json& j, const ChatMessage& message) {
    j = nlohmann::json{
        {"author", to_string(message.author)},
        {"text", message.text},
        {"round_index", message.round_index},
        {"token_count", message.token_count},
    };
    if (message.draft_text) j["draft_text"] = *message.draft_text;
    if (message.fallacy_label) j["fallacy_label"] = *message.fallacy_label;
}

void from_json(const nlohmann::json& j, ChatMessage& message) {
    message.author = author_from_string(j.at("author").get<std::string>());
    j.at("text").get_to(message.text);
    j.at("round_index").get_to(message.round_index);
    j.at("token_count").get_to(message.token_count);
    if (j.contains("draft_text")) message.draft_text = j.at("draft_text").get<std::string>();
    if (j.contains("fallacy_label")) message.fallacy_label = j.at("fallacy_label").get<std::string>();
}

void to_json(nlohmann::json& j, const DebateResult& result) {
    j = nlohmann::json{
        {"claim_id", result.claim_id},
        {"scenario", to_string(result.scenario)},
        {"repetition", result.repetition},
        {"rounds_completed", result.rounds_completed},
        {"termination", to_string(result.termination)},
        {"final_stance", to_string(result.final_stance)},
        {"initial_stance", to_string(result.initial_stance)},
        {"transcript_ref", result.transcript_ref},
        {"model_ids", result.model_ids},
        {"total_tokens", result.total_tokens},
    };
}

void from_json(const nlohmann::json& j, DebateResult& result) {
    j.at("claim_id").get_to(result.claim_id);
    result.scenario = scenario_from_string(j.at("scenario").get<std::string>());
    j.at("repetition").get_to(result.repetition);
    j.at("rounds_completed").get_to(result.rounds_completed);
    result.termination = termination_from_string(j.at("termination").get<std::string>());
    result.final_stance = stance_from_string(j.at("final_stance").get<std::string>());
    result.initial_stance = stance_from_string(j.at("initial_stance").get<std::string>());
    j.at("transcript_ref").get_to(result.transcript_ref);
    j.at("model_ids").get_to(result.model_ids);
    j.at("total_tokens").get_to(result.total_tokens);
}

std::vector<ClaimRecord> parse_claim_lines(const std::string& content) {
    std::vector<ClaimRecord> records;
    std::istringstream in(content);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            records.push_back(nlohmann::json::parse(line).get<ClaimRecord>());
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("claim dataset line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

std::string claim_to_line(const ClaimRecord& record) {
    return nlohmann::json(record).dump();
}

}  // namespace debate
