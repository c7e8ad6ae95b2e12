#include "debate/moderation.hpp"

#include <algorithm>
#include <cctype>

#include "debate/log.hpp"

namespace debate {

std::string to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::Yes: return "Yes";
        case Verdict::No: return "No";
        case Verdict::Unknown: return "Unknown";
    }
    return "Unknown";
}

Verdict parse_yes_no(const std::string& raw) {
    std::string token;
    auto classify = [&token]() -> std::optional<Verdict> {
        if (token == "yes") return Verdict::Yes;
        if (token == "no") return Verdict::No;
        return std::nullopt;
    };
    for (unsigned char c : raw) {
        if (std::isalpha(c)) {
            token += static_cast<char>(std::tolower(c));
        } else if (!token.empty()) {
            if (auto verdict = classify()) return *verdict;
            token.clear();
        }
    }
    if (!token.empty()) {
        if (auto verdict = classify()) return *verdict;
    }
    return Verdict::Unknown;
}

std::vector<ChatMessage> recent_rounds(const Transcript& transcript, int rounds) {
    std::vector<ChatMessage> recent;
    int last_round = 0;
    for (const auto& message : transcript.messages) {
        if (message.author == MessageAuthor::System) continue;
        last_round = std::max(last_round, message.round_index);
    }
    for (const auto& message : transcript.messages) {
        if (message.author == MessageAuthor::System) continue;
        if (message.round_index > last_round - rounds) recent.push_back(message);
    }
    return recent;
}

namespace {

// One completion over the labeled excerpt; nullopt when every configured
// backend refused.
std::optional<std::string> ask(const Moderator& moderator, Backend& backend,
                               const PromptTemplate& prompt, const ClaimRecord& claim,
                               const std::vector<ChatMessage>& excerpt,
                               const std::optional<std::string>& carried_note,
                               const Summarizer& summarizer) {
    std::string system_text = render_template(prompt, claim);

    Transcript slice;
    slice.messages = excerpt;
    slice.summary_note = carried_note;
    TokenCounter counter = [&backend](const std::string& text) {
        return backend.count_tokens(text);
    };
    TokenBudget budget{backend.config().context_window_tokens, moderator.max_output_tokens};
    FitOverhead overhead;
    overhead.per_message = 1;  // digest speaker labels
    if (!slice.messages.empty()) {
        slice = fit_to_budget(slice, system_text, budget, summarizer, counter, overhead);
    }

    CompletionRequest request;
    request.system_text = compose_system_text(system_text, slice.summary_note);
    request.turns.emplace_back(Speaker::Other, dialogue_digest(slice.messages));
    request.temperature = moderator.temperature;
    request.max_output_tokens = moderator.max_output_tokens;

    auto response =
        complete_with_policy(backend, moderator.fallback.get(), request, moderator.retry);
    if (response.refused) {
        log::warn("moderator '" + response.answered_by + "' refused the " +
                  to_string(prompt.role) + " check");
        return std::nullopt;
    }
    log::debug(to_string(prompt.role) + " raw reply from '" + response.answered_by +
               "': " + response.text);
    return response.text;
}

Verdict checked(const Moderator& moderator, Backend* backend, const PromptTemplate& prompt,
                const ClaimRecord& claim, const std::vector<ChatMessage>& excerpt,
                const std::optional<std::string>& note, const Summarizer& summarizer) {
    if (backend == nullptr) {
        throw ConfigError("moderator backend missing for " + to_string(prompt.role));
    }
    auto reply = ask(moderator, *backend, prompt, claim, excerpt, note, summarizer);
    if (!reply) return Verdict::Unknown;
    return parse_yes_no(*reply);
}

}  // namespace

Verdict check_convinced(const Moderator& moderator, const ClaimRecord& claim,
                        const Transcript& transcript, const Summarizer& summarizer) {
    return checked(moderator, moderator.convinced_backend.get(), moderator.convinced_prompt,
                   claim, transcript.messages, transcript.summary_note, summarizer);
}

Verdict check_on_topic(const Moderator& moderator, const ClaimRecord& claim,
                       const Transcript& transcript, const Summarizer& summarizer) {
    return checked(moderator, moderator.topic_backend.get(), moderator.topic_prompt, claim,
                   recent_rounds(transcript, moderator.recent_round_window), std::nullopt,
                   summarizer);
}

Verdict check_pleasantry_loop(const Moderator& moderator, const ClaimRecord& claim,
                              const Transcript& transcript, const Summarizer& summarizer) {
    return checked(moderator, moderator.pleasantry_backend.get(), moderator.pleasantry_prompt,
                   claim, recent_rounds(transcript, moderator.recent_round_window),
                   std::nullopt, summarizer);
}

SubordinateVerdicts run_subordinate_checks(const Moderator& moderator, const ClaimRecord& claim,
                                           const Transcript& transcript,
                                           const Summarizer& summarizer) {
    SubordinateVerdicts verdicts;
    verdicts.convinced = check_convinced(moderator, claim, transcript, summarizer);
    verdicts.on_topic = check_on_topic(moderator, claim, transcript, summarizer);
    verdicts.pleasantry_loop = check_pleasantry_loop(moderator, claim, transcript, summarizer);
    return verdicts;
}

MasterDecision master_decision(const SubordinateVerdicts& verdicts, int round_index,
                               int max_rounds) {
    if (round_index < 1) throw ValidationError("master_decision: round_index must be >= 1");
    if (max_rounds < 1) throw ValidationError("master_decision: max_rounds must be >= 1");
    if (verdicts.convinced == Verdict::Yes) {
        return {DecisionAction::Terminate, TerminationReason::Convinced};
    }
    if (verdicts.pleasantry_loop == Verdict::Yes) {
        return {DecisionAction::Terminate, TerminationReason::PleasantryLoop};
    }
    if (verdicts.on_topic == Verdict::No) {
        return {DecisionAction::Terminate, TerminationReason::OffTopic};
    }
    if (round_index >= max_rounds) {
        return {DecisionAction::Terminate, TerminationReason::RoundLimit};
    }
    return {DecisionAction::Continue, std::nullopt};
}

Stance final_verdict(const Moderator& moderator, const ClaimRecord& claim,
                     const Transcript& transcript, TerminationReason termination,
                     const Summarizer& summarizer) {
    if (termination == TerminationReason::Convinced) return Stance::Agree;
    Verdict verdict;
    try {
        verdict = check_convinced(moderator, claim, transcript, summarizer);
    } catch (const DebateFailure& e) {
        log::warn(std::string("final stance check failed, recording Unknown: ") + e.what());
        return Stance::Unknown;
    }
    switch (verdict) {
        case Verdict::Yes: return Stance::Agree;
        case Verdict::No: return Stance::Disagree;
        case Verdict::Unknown: return Stance::Unknown;
    }
    return Stance::Unknown;
}

}  // namespace debate
