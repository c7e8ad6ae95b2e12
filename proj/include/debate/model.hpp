#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "debate/errors.hpp"

namespace debate {

// ---------------------------------------------------------------------------
// Claims
// ---------------------------------------------------------------------------

enum class ClaimSide { Pro, Con };

// One side of a polarizing topic. Exactly two records share a pair_id, one
// Pro and one Con.
struct ClaimRecord {
    std::string claim_id;
    std::string topic;
    std::string claim;
    std::string reason;
    ClaimSide side = ClaimSide::Pro;
    std::string pair_id;
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

// Record-level invariant checks. Violations are data, not failures.
ValidationReport validate_claim_record(const ClaimRecord& record);

// Dataset-level checks on top of the per-record ones: unique claim_ids and
// every pair_id covered by exactly one Pro and one Con record.
ValidationReport validate_claim_dataset(const std::vector<ClaimRecord>& records);

// ---------------------------------------------------------------------------
// Debate scenarios and transcripts
// ---------------------------------------------------------------------------

enum class ScenarioKind { NoHelper, FallaciousHelper, LogicalHelper };

constexpr ScenarioKind kAllScenarios[] = {
    ScenarioKind::NoHelper,
    ScenarioKind::FallaciousHelper,
    ScenarioKind::LogicalHelper,
};

enum class MessageAuthor { Persuader, Debater, System };

struct ChatMessage {
    MessageAuthor author = MessageAuthor::System;
    std::string text;
    int round_index = 0;
    // Present iff a helper revised this message; holds the pre-revision draft.
    std::optional<std::string> draft_text;
    // Present only on persuader messages in a FallaciousHelper debate.
    std::optional<std::string> fallacy_label;
    int token_count = 0;
};

struct Transcript {
    std::string claim_id;
    ScenarioKind scenario = ScenarioKind::NoHelper;
    int repetition = 0;
    std::vector<ChatMessage> messages;
    // Memory-agent summary currently attached to the system context.
    std::optional<std::string> summary_note;
};

// Checks the alternation invariant (Persuader, Debater, Persuader, ... with
// System messages excluded) plus the opener authorship rule.
ValidationReport validate_transcript(const Transcript& transcript);

// Speaker-labeled rendering ("Persuader: ...\nDebater: ..."), one line per
// non-system message. Under the word tokenizer each label costs one token.
std::string dialogue_digest(const std::vector<ChatMessage>& messages);

// ---------------------------------------------------------------------------
// Outcomes
// ---------------------------------------------------------------------------

enum class Stance { Agree, Disagree, Unknown };

enum class TerminationReason {
    Convinced,
    RoundLimit,
    OffTopic,
    PleasantryLoop,
    BackendFailure,
};

struct DebateResult {
    std::string claim_id;
    ScenarioKind scenario = ScenarioKind::NoHelper;
    int repetition = 0;
    int rounds_completed = 1;
    TerminationReason termination = TerminationReason::RoundLimit;
    Stance final_stance = Stance::Unknown;
    Stance initial_stance = Stance::Unknown;
    std::string transcript_ref;
    std::map<std::string, std::string> model_ids;
    std::int64_t total_tokens = 0;
};

// A debate that ran past two rounds cannot have started in agreement: the
// convinced check runs after every round, so surviving round two means the
// debater disagreed at the start. At two rounds or fewer the stance is only
// known when the debate ended in conviction or an explicit disagreement.
Stance infer_initial_stance(int rounds_completed, TerminationReason termination,
                            Stance final_stance);

// ---------------------------------------------------------------------------
// Enum names (also the serialized forms)
// ---------------------------------------------------------------------------

std::string to_string(ClaimSide side);
std::string to_string(ScenarioKind scenario);
std::string to_string(MessageAuthor author);
std::string to_string(Stance stance);
std::string to_string(TerminationReason reason);

ClaimSide claim_side_from_string(const std::string& name);
ScenarioKind scenario_from_string(const std::string& name);
MessageAuthor author_from_string(const std::string& name);
Stance stance_from_string(const std::string& name);
TerminationReason termination_from_string(const std::string& name);

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

void to_json(nlohmann::json& j, const ClaimRecord& record);
void from_json(const nlohmann::json& j, ClaimRecord& record);
void to_json(nlohmann::json& j, const ChatMessage& message);
void from_json(const nlohmann::json& j, ChatMessage& message);
void to_json(nlohmann::json& j, const DebateResult& result);
void from_json(const nlohmann::json& j, DebateResult& result);

// Claim dataset files are UTF-8 JSONL, one ClaimRecord per line.
std::vector<ClaimRecord> parse_claim_lines(const std::string& content);
std::string claim_to_line(const ClaimRecord& record);

}  // namespace debate
