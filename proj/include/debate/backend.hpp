#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "debate/errors.hpp"

namespace debate {

// ---------------------------------------------------------------------------
// Requests and responses
// ---------------------------------------------------------------------------

enum class Speaker { Self, Other };

struct CompletionRequest {
    std::string system_text;
    // Ordered conversation from the calling agent's point of view.
    std::vector<std::pair<Speaker, std::string>> turns;
    // Absent means provider default.
    std::optional<double> temperature;
    std::optional<int> max_output_tokens;
};

struct CompletionResponse {
    std::string text;
    int prompt_tokens = 0;
    int completion_tokens = 0;
    // Provider safety declines surface here, never as transport errors.
    bool refused = false;
    std::string answered_by;
    int attempts = 1;
};

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

enum class BackendKind { HttpProvider, Scripted };

struct ScriptEntry {
    std::string text;
    bool refuse = false;
    bool transport_error = false;
};

struct HttpEndpoint {
    std::string base_url;                      // e.g. https://api.openai.com
    std::string path = "/v1/chat/completions"; // OpenAI-style wire format
    std::string model;
    std::string api_key_env;                   // credential read from this env var
    int timeout_seconds = 120;
    int min_interval_ms = 0;                   // shared rate limit per backend_id
};

struct BackendConfig {
    std::string backend_id;
    BackendKind kind = BackendKind::Scripted;
    int context_window_tokens = 4096;
    std::optional<HttpEndpoint> endpoint;  // HttpProvider kind
    std::vector<ScriptEntry> script;       // Scripted kind
    // Replay the script from the start instead of raising ScriptExhausted.
    bool cycle_script = false;
};

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{250};
    double backoff_multiplier = 2.0;
};

// ---------------------------------------------------------------------------
// Backend interface
// ---------------------------------------------------------------------------

// A chat-completion endpoint. Implementations must tolerate concurrent
// complete() calls from multiple debates.
class Backend {
public:
    virtual ~Backend() = default;

    // Throws TransportError / ScriptExhausted.
    virtual CompletionResponse complete(const CompletionRequest& request) = 0;

    // Scripted backends count whitespace-delimited words. HTTP providers use
    // a byte-based approximation (ceil(bytes / 4)) since the real tokenizer
    // is not available locally; count_tokens("") is 0 either way.
    virtual int count_tokens(const std::string& text) const = 0;

    virtual const BackendConfig& config() const = 0;

    const std::string& id() const { return config().backend_id; }
};

std::shared_ptr<Backend> make_backend(const BackendConfig& config);

CompletionResponse complete(Backend& backend, const CompletionRequest& request);

// Retries transient transport errors per policy. A refusal from the primary
// is replayed once against the fallback when one is configured; the response
// records which backend answered and how many attempts it took.
CompletionResponse complete_with_policy(Backend& primary, Backend* fallback,
                                        const CompletionRequest& request,
                                        const RetryPolicy& policy);

// The token accounting contract between the memory module and the backends:
// count(system_text) + sum over turns of count(turn text).
int request_token_total(const Backend& backend, const CompletionRequest& request);

// The documented test tokenizer: whitespace-delimited word count.
int count_words(const std::string& text);

// ---------------------------------------------------------------------------
// JSON (config files and script files)
// ---------------------------------------------------------------------------

void to_json(nlohmann::json& j, const ScriptEntry& entry);
void from_json(const nlohmann::json& j, ScriptEntry& entry);
void to_json(nlohmann::json& j, const BackendConfig& config);
void from_json(const nlohmann::json& j, BackendConfig& config);

// Script files are JSONL, one ScriptEntry per line.
std::vector<ScriptEntry> parse_script_lines(const std::string& content);

}  // namespace debate
