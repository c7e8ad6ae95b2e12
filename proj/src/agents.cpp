#include "debate/agents.hpp"

#include <algorithm>
#include <cctype>

#include "debate/engine.hpp"
#include "debate/log.hpp"

namespace debate {

void prepare_agent(AgentConfig& agent, const ClaimRecord& claim) {
    if (!agent.backend) {
        throw ConfigError("agent " + to_string(agent.role) + " has no backend");
    }
    agent.system_text = render_template(agent.prompt, claim);
    if (agent.helper) prepare_agent(*agent.helper, claim);
}

TokenBudget budget_for(const AgentConfig& agent) {
    return TokenBudget{agent.backend->config().context_window_tokens, agent.max_output_tokens};
}

std::vector<std::pair<Speaker, std::string>> transcript_turns(const Transcript& transcript,
                                                              MessageAuthor self) {
    std::vector<std::pair<Speaker, std::string>> turns;
    for (const auto& message : transcript.messages) {
        if (message.author == MessageAuthor::System) continue;
        turns.emplace_back(message.author == self ? Speaker::Self : Speaker::Other,
                           message.text);
    }
    return turns;
}

namespace {

const ChatMessage* last_dialogue_message(const Transcript& transcript) {
    for (auto it = transcript.messages.rbegin(); it != transcript.messages.rend(); ++it) {
        if (it->author != MessageAuthor::System) return &*it;
    }
    return nullptr;
}

TokenCounter counter_for(const AgentConfig& agent) {
    Backend* backend = agent.backend.get();
    return [backend](const std::string& text) { return backend->count_tokens(text); };
}

CompletionResponse run_completion(AgentConfig& agent, const CompletionRequest& request) {
    auto response =
        complete_with_policy(*agent.backend, agent.fallback.get(), request, agent.retry);
    if (response.refused) {
        throw DebateFailure(to_string(agent.role) + " backend '" + response.answered_by +
                            "' refused to reply");
    }
    return response;
}

}  // namespace

ChatMessage persuader_turn(AgentConfig& config, const ClaimRecord& claim,
                           const Transcript& transcript, ScenarioKind scenario,
                           const Summarizer& summarizer) {
    const ChatMessage* last = last_dialogue_message(transcript);
    if (last == nullptr) {
        ChatMessage opener;
        opener.author = MessageAuthor::Persuader;
        opener.text = build_opener(claim);
        opener.round_index = 1;
        opener.token_count = config.backend->count_tokens(opener.text);
        return opener;
    }
    if (last->author != MessageAuthor::Debater) {
        throw ValidationError("persuader_turn: last message must be the debater's");
    }
    if (config.system_text.empty()) {
        throw ConfigError("persuader agent is not prepared for a claim");
    }

    Transcript fitted = fit_to_budget(transcript, config.system_text, budget_for(config),
                                      summarizer, counter_for(config));
    CompletionRequest request;
    request.system_text = compose_system_text(config.system_text, fitted.summary_note);
    request.turns = transcript_turns(fitted, MessageAuthor::Persuader);
    request.temperature = config.temperature;
    request.max_output_tokens = config.max_output_tokens;
    auto response = run_completion(config, request);

    ChatMessage message;
    message.author = MessageAuthor::Persuader;
    message.round_index = last->round_index + 1;
    message.text = response.text;
    message.token_count = response.completion_tokens;

    if (scenario != ScenarioKind::NoHelper) {
        if (!config.helper) {
            throw ConfigError(to_string(scenario) + " scenario has no helper agent");
        }
        HelperOutput revised = helper_revise(*config.helper, transcript, response.text,
                                             summarizer);
        message.draft_text = response.text;
        message.text = revised.revised_text;
        message.token_count = config.helper->backend->count_tokens(revised.revised_text);
        if (scenario == ScenarioKind::FallaciousHelper) {
            message.fallacy_label = revised.fallacy_label;
            if (!revised.label_on_taxonomy) {
                log::warn("helper chose off-taxonomy fallacy '" +
                          revised.fallacy_label.value_or("") + "'");
            }
        }
    }
    return message;
}

ChatMessage debater_turn(AgentConfig& config, const Transcript& transcript,
                         const Summarizer& summarizer) {
    const ChatMessage* last = last_dialogue_message(transcript);
    if (last == nullptr || last->author != MessageAuthor::Persuader) {
        throw ValidationError("debater_turn: last message must be the persuader's");
    }
    if (config.system_text.empty()) {
        throw ConfigError("debater agent is not prepared for a claim");
    }

    Transcript fitted = fit_to_budget(transcript, config.system_text, budget_for(config),
                                      summarizer, counter_for(config));
    CompletionRequest request;
    request.system_text = compose_system_text(config.system_text, fitted.summary_note);
    request.turns = transcript_turns(fitted, MessageAuthor::Debater);
    request.temperature = config.temperature;
    request.max_output_tokens = config.max_output_tokens;
    auto response = run_completion(config, request);

    ChatMessage message;
    message.author = MessageAuthor::Debater;
    message.round_index = last->round_index;
    message.text = response.text;
    message.token_count = response.completion_tokens;
    return message;
}

// ---------------------------------------------------------------------------
// Helper pipeline
// ---------------------------------------------------------------------------

namespace {

// Case-insensitive "marker at the start of a trimmed line"; returns the text
// after the marker, or npos-like failure via found = false.
bool take_marked_line(const std::string& line, const char* marker, std::string* rest) {
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) return false;
    std::size_t m = 0;
    std::size_t i = start;
    while (marker[m] != '\0') {
        if (i >= line.size() ||
            std::toupper(static_cast<unsigned char>(line[i])) != marker[m]) {
            return false;
        }
        ++i;
        ++m;
    }
    *rest = line.substr(i);
    return true;
}

std::string trim(const std::string& text) {
    std::size_t begin = text.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    std::size_t end = text.find_last_not_of(" \t\r\n");
    return text.substr(begin, end - begin + 1);
}

}  // namespace

HelperOutput parse_helper_output(const std::string& raw, HelperKind kind) {
    std::optional<std::string> label;
    std::optional<std::string> argument;

    std::size_t pos = 0;
    while (pos <= raw.size()) {
        std::size_t eol = raw.find('\n', pos);
        std::string line = raw.substr(pos, eol == std::string::npos ? std::string::npos
                                                                    : eol - pos);
        std::string rest;
        if (!argument && !label && take_marked_line(line, "FALLACY:", &rest)) {
            label = trim(rest);
        } else if (!argument && take_marked_line(line, "ARGUMENT:", &rest)) {
            // Everything from here to the end of the reply is the argument.
            std::string tail = eol == std::string::npos ? "" : raw.substr(eol + 1);
            argument = trim(tail.empty() ? rest : rest + "\n" + tail);
        }
        if (eol == std::string::npos) break;
        pos = eol + 1;
    }

    if (!argument || argument->empty()) {
        throw HelperParseError("helper reply has no ARGUMENT line");
    }
    if (kind == HelperKind::Fallacious && (!label || label->empty())) {
        throw HelperParseError("fallacious helper reply has no FALLACY line");
    }

    HelperOutput output;
    output.revised_text = *argument;
    if (kind == HelperKind::Fallacious) {
        output.fallacy_label = *label;
        output.label_on_taxonomy = debate::label_on_taxonomy(*label);
    }
    return output;
}

HelperOutput helper_revise(AgentConfig& helper, const Transcript& transcript,
                           const std::string& draft, const Summarizer& summarizer) {
    HelperKind kind;
    if (helper.role == TemplateRole::FallaciousHelper) {
        kind = HelperKind::Fallacious;
    } else if (helper.role == TemplateRole::LogicalHelper) {
        kind = HelperKind::Logical;
    } else {
        throw ConfigError("helper_revise: agent role is " + to_string(helper.role));
    }
    if (helper.system_text.empty()) {
        throw ConfigError("helper agent is not prepared for a claim");
    }

    const std::string kHistoryHead = "Conversation history:";
    const std::string kDraftHead = "Desired response:";
    const std::string kFormatReminder =
        kind == HelperKind::Fallacious
            ? "Your reply did not match the required format. Reply again using exactly:\n"
              "FALLACY: <the fallacy you chose>\nARGUMENT: <the restructured response>"
            : "Your reply did not match the required format. Reply again using exactly:\n"
              "ARGUMENT: <the reconstructed response>";

    TokenCounter counter = counter_for(helper);
    std::string prior_reply;
    for (int attempt = 0; attempt < 2; ++attempt) {
        // The request wraps the history digest in framing plus the draft, and
        // on the retry replays the malformed reply with a format reminder;
        // all of that counts against the helper's budget.
        FitOverhead overhead;
        overhead.per_message = 1;
        overhead.fixed = counter(kHistoryHead) + counter(kDraftHead) + counter(draft);
        if (attempt > 0) overhead.fixed += counter(prior_reply) + counter(kFormatReminder);
        Transcript fitted =
            transcript.messages.empty()
                ? transcript
                : fit_to_budget(transcript, helper.system_text, budget_for(helper),
                                summarizer, counter, overhead);

        CompletionRequest request;
        request.system_text = compose_system_text(helper.system_text, fitted.summary_note);
        std::string user = kHistoryHead + "\n" + dialogue_digest(fitted.messages) + "\n\n" +
                           kDraftHead + "\n" + draft;
        request.turns.emplace_back(Speaker::Other, user);
        if (attempt > 0) {
            request.turns.emplace_back(Speaker::Self, prior_reply);
            request.turns.emplace_back(Speaker::Other, kFormatReminder);
        }
        request.temperature = helper.temperature;
        request.max_output_tokens = helper.max_output_tokens;

        auto response = run_completion(helper, request);
        try {
            return parse_helper_output(response.text, kind);
        } catch (const HelperParseError& e) {
            if (attempt > 0) throw;
            log::debug(std::string("helper reply unparseable, asking again: ") + e.what());
            prior_reply = response.text;
        }
    }
    throw HelperParseError("helper reply unparseable after retry");
}

}  // namespace debate
