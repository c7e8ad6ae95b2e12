#include "debate/memory.hpp"

#include <algorithm>

#include "debate/log.hpp"

namespace debate {

std::string compose_system_text(const std::string& system_text,
                                const std::optional<std::string>& summary_note) {
    if (!summary_note || summary_note->empty()) return system_text;
    if (system_text.empty()) return *summary_note;
    return system_text + "\n\n" + *summary_note;
}

int transcript_token_total(const Transcript& transcript, const std::string& system_text,
                           const TokenCounter& counter, const FitOverhead& overhead) {
    int total = counter(compose_system_text(system_text, transcript.summary_note));
    for (const auto& message : transcript.messages) {
        total += counter(message.text) + overhead.per_message;
    }
    return total + overhead.fixed;
}

Transcript fit_to_budget(const Transcript& transcript, const std::string& system_text,
                         const TokenBudget& budget, const Summarizer& summarizer,
                         const TokenCounter& counter, const FitOverhead& overhead) {
    if (budget.effective_budget() <= 0) {
        throw BudgetInfeasible("effective budget is " + std::to_string(budget.effective_budget()) +
                               " (context window " + std::to_string(budget.context_window) +
                               ", reserved output " + std::to_string(budget.reserved_output) + ")");
    }
    if (transcript.messages.empty()) {
        throw ValidationError("fit_to_budget: transcript has no messages");
    }

    Transcript fitted = transcript;
    auto total = [&] { return transcript_token_total(fitted, system_text, counter, overhead); };

    // Summarize the earliest intermediate message (everything between the
    // opener and the last message) until the total fits; minimal by
    // construction since each pass removes exactly one message.
    while (total() > budget.effective_budget() && fitted.messages.size() > 2) {
        std::vector<ChatMessage> batch{fitted.messages[1]};
        std::string summary = summarizer(batch);
        if (fitted.summary_note && !fitted.summary_note->empty()) {
            fitted.summary_note = *fitted.summary_note + "\n" + summary;
        } else {
            fitted.summary_note = summary;
        }
        fitted.messages.erase(fitted.messages.begin() + 1);
    }

    if (total() > budget.effective_budget()) {
        throw BudgetInfeasible("irreducible context of " + std::to_string(total()) +
                               " tokens exceeds the effective budget of " +
                               std::to_string(budget.effective_budget()));
    }
    return fitted;
}

namespace {

std::string round_span(const std::vector<ChatMessage>& messages) {
    int lo = messages.front().round_index;
    int hi = lo;
    for (const auto& message : messages) {
        lo = std::min(lo, message.round_index);
        hi = std::max(hi, message.round_index);
    }
    if (lo == hi) return "(round " + std::to_string(lo) + ")";
    return "(rounds " + std::to_string(lo) + "-" + std::to_string(hi) + ")";
}

}  // namespace

std::string summarize_messages(Backend& backend, const std::vector<ChatMessage>& messages,
                               const RetryPolicy& retry) {
    if (messages.empty()) {
        throw ValidationError("summarize_messages: no messages");
    }

    int input_tokens = 0;
    for (const auto& message : messages) input_tokens += backend.count_tokens(message.text);
    const std::string digest = dialogue_digest(messages);
    const std::string span = round_span(messages);

    const char* kInstruction =
        "Condense the debate excerpt below into the fewest words that preserve every "
        "argument, concession, and refusal. Reply with the summary only.";
    const char* kStricterInstruction =
        "Condense the debate excerpt below. Your previous attempt was not shorter than "
        "the excerpt itself; use at most half as many words this time. Reply with the "
        "summary only.";

    for (int attempt = 0; attempt < 2; ++attempt) {
        CompletionRequest request;
        request.system_text = attempt == 0 ? kInstruction : kStricterInstruction;
        request.turns.emplace_back(Speaker::Other, digest);
        auto response = complete_with_policy(backend, nullptr, request, retry);
        if (response.refused) {
            throw DebateFailure("summarizer backend '" + backend.id() + "' refused");
        }
        std::string summary = span + " " + response.text;
        if (backend.count_tokens(summary) < input_tokens) return summary;
        log::debug("summary of " + std::to_string(input_tokens) +
                   " tokens came back no smaller; asking again");
    }
    throw SummaryNotSmaller("summarizer could not produce a summary shorter than its " +
                            std::to_string(input_tokens) + "-token input");
}

}  // namespace debate
