#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "debate/backend.hpp"
#include "debate/errors.hpp"
#include "debate/memory.hpp"
#include "debate/model.hpp"
#include "debate/prompts.hpp"

namespace debate {

// One participant: a live backend plus its role prompt. system_text holds the
// prompt rendered for the current debate's claim (see prepare_agent).
struct AgentConfig {
    TemplateRole role = TemplateRole::Persuader;
    std::shared_ptr<Backend> backend;
    // Optional second backend consulted once when the primary refuses.
    std::shared_ptr<Backend> fallback;
    PromptTemplate prompt;
    std::string system_text;
    std::optional<double> temperature;
    int max_output_tokens = 512;
    RetryPolicy retry;
    // Persuader only; present iff the scenario uses a helper.
    std::shared_ptr<AgentConfig> helper;
};

// Renders the agent's prompt for this claim. Must run before any turn.
void prepare_agent(AgentConfig& agent, const ClaimRecord& claim);

// context window minus the agent's reserved reply length.
TokenBudget budget_for(const AgentConfig& agent);

enum class HelperKind { Fallacious, Logical };

struct HelperOutput {
    std::string revised_text;
    // Fallacious helpers always carry a label, recorded verbatim.
    std::optional<std::string> fallacy_label;
    // False when the label is not a recognized taxonomy name (kept anyway).
    bool label_on_taxonomy = true;
};

// Extracts the "FALLACY:" / "ARGUMENT:" lines (case-insensitive markers,
// surrounding whitespace tolerated; the argument runs to the end of the
// reply). Logical replies need only ARGUMENT and never yield a label.
HelperOutput parse_helper_output(const std::string& raw, HelperKind kind);

// The transcript as one side sees it: Self for its own messages, Other for
// the opponent's. Only final texts are exposed, never drafts or labels.
std::vector<std::pair<Speaker, std::string>> transcript_turns(const Transcript& transcript,
                                                              MessageAuthor self);

// Produces the next persuader message. On an empty transcript this is the
// canned opener (no backend call, never helper-revised). Otherwise the
// persuader backend drafts a reply; outside NoHelper the helper rewrites it
// and the message keeps the draft (plus the fallacy label when the helper is
// fallacious). The transcript is budget-fitted before every completion.
ChatMessage persuader_turn(AgentConfig& config, const ClaimRecord& claim,
                           const Transcript& transcript, ScenarioKind scenario,
                           const Summarizer& summarizer);

// Produces the debater's reply to the latest persuader message.
ChatMessage debater_turn(AgentConfig& config, const Transcript& transcript,
                         const Summarizer& summarizer);

// Sends the conversation history plus the draft to the helper backend and
// parses the structured reply, re-asking once with an explicit format
// reminder before giving up with HelperParseError.
HelperOutput helper_revise(AgentConfig& helper, const Transcript& transcript,
                           const std::string& draft, const Summarizer& summarizer);

}  // namespace debate
