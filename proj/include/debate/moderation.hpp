#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "debate/backend.hpp"
#include "debate/memory.hpp"
#include "debate/model.hpp"
#include "debate/prompts.hpp"

namespace debate {

enum class Verdict { Yes, No, Unknown };

std::string to_string(Verdict verdict);

// One record per completed round; Unknown entries never terminate a debate.
struct SubordinateVerdicts {
    Verdict convinced = Verdict::Unknown;
    Verdict on_topic = Verdict::Unknown;
    Verdict pleasantry_loop = Verdict::Unknown;
};

enum class DecisionAction { Continue, Terminate };

struct MasterDecision {
    DecisionAction action = DecisionAction::Continue;
    // Present iff action = Terminate.
    std::optional<TerminationReason> reason;
};

// One dedicated backend per moderation task, with a shared refusal fallback.
struct Moderator {
    std::shared_ptr<Backend> convinced_backend;
    std::shared_ptr<Backend> topic_backend;
    std::shared_ptr<Backend> pleasantry_backend;
    std::shared_ptr<Backend> fallback;
    PromptTemplate convinced_prompt;
    PromptTemplate topic_prompt;
    PromptTemplate pleasantry_prompt;
    std::optional<double> temperature;
    int max_output_tokens = 16;
    RetryPolicy retry;
    // How many trailing rounds the topic and pleasantry checks see.
    int recent_round_window = 2;
};

// First standalone yes/no token of the reply decides, case-insensitively and
// ignoring punctuation ("I think no, because..." reads as No); no such token
// means Unknown.
Verdict parse_yes_no(const std::string& raw);

// The messages belonging to the last `rounds` rounds of the transcript.
std::vector<ChatMessage> recent_rounds(const Transcript& transcript, int rounds);

// Each check issues one completion over a speaker-labeled excerpt and parses
// the reply. Refusal on every configured backend yields Unknown; transport
// failures propagate. The convinced check reads the whole dialogue, the other
// two only the recent window.
Verdict check_convinced(const Moderator& moderator, const ClaimRecord& claim,
                        const Transcript& transcript, const Summarizer& summarizer);
Verdict check_on_topic(const Moderator& moderator, const ClaimRecord& claim,
                       const Transcript& transcript, const Summarizer& summarizer);
Verdict check_pleasantry_loop(const Moderator& moderator, const ClaimRecord& claim,
                              const Transcript& transcript, const Summarizer& summarizer);

// Runs the three checks in a fixed order (convinced, topic, pleasantry) so
// scripted moderators replay deterministically.
SubordinateVerdicts run_subordinate_checks(const Moderator& moderator, const ClaimRecord& claim,
                                           const Transcript& transcript,
                                           const Summarizer& summarizer);

// Termination priority: Convinced, then PleasantryLoop, then OffTopic, then
// the round cap; anything else continues. Total and deterministic.
MasterDecision master_decision(const SubordinateVerdicts& verdicts, int round_index,
                               int max_rounds);

// The debater's closing stance. Convinced terminations force Agree without
// another call; otherwise one convinced-check over the full transcript maps
// Yes/No/Unknown onto Agree/Disagree/Unknown. Backend failures degrade to
// Unknown with a warning instead of propagating.
Stance final_verdict(const Moderator& moderator, const ClaimRecord& claim,
                     const Transcript& transcript, TerminationReason termination,
                     const Summarizer& summarizer);

}  // namespace debate
