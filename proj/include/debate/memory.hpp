#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "debate/backend.hpp"
#include "debate/errors.hpp"
#include "debate/model.hpp"

namespace debate {

struct TokenBudget {
    int context_window = 4096;
    // Defaults to the caller's max_output_tokens so a full-length reply
    // always has room.
    int reserved_output = 512;
    int effective_budget() const { return context_window - reserved_output; }
};

// Extra request tokens the caller will wrap around the transcript when it
// builds the completion (digest speaker labels, framing lines, a pending
// draft). Zero for agents that send the turns verbatim.
struct FitOverhead {
    int per_message = 0;
    int fixed = 0;
};

using TokenCounter = std::function<int(const std::string&)>;
using Summarizer = std::function<std::string(const std::vector<ChatMessage>&)>;

// The summary note rides on the system prompt, separated by a blank line.
std::string compose_system_text(const std::string& system_text,
                                const std::optional<std::string>& summary_note);

// Token cost of the request the transcript will become: composed system text
// plus every message (with per-message overhead) plus the fixed overhead.
int transcript_token_total(const Transcript& transcript, const std::string& system_text,
                           const TokenCounter& counter, const FitOverhead& overhead = {});

// Brings the transcript under budget.effective_budget() by summarizing
// intermediate messages earliest-first, one at a time, each summary appended
// to summary_note; stops at the first total that fits. The opener and the
// last message are returned byte-identical. Throws BudgetInfeasible when no
// amount of summarizing can fit (the irreducible opener + last message +
// system context already exceed the budget).
Transcript fit_to_budget(const Transcript& transcript, const std::string& system_text,
                         const TokenBudget& budget, const Summarizer& summarizer,
                         const TokenCounter& counter, const FitOverhead& overhead = {});

// One completion call condensing the messages; the returned string names the
// round span it covers. Re-asks once with a stricter instruction if the
// summary is not shorter than its input, then throws SummaryNotSmaller.
std::string summarize_messages(Backend& backend, const std::vector<ChatMessage>& messages,
                               const RetryPolicy& retry = {});

}  // namespace debate
