#include "debate/backend.hpp"

#include <cctype>
#include <cstdlib>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "debate/log.hpp"

namespace debate {

int count_words(const std::string& text) {
    int count = 0;
    bool in_word = false;
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            in_word = false;
        } else if (!in_word) {
            in_word = true;
            ++count;
        }
    }
    return count;
}

int request_token_total(const Backend& backend, const CompletionRequest& request) {
    int total = backend.count_tokens(request.system_text);
    for (const auto& [speaker, text] : request.turns) {
        (void)speaker;
        total += backend.count_tokens(text);
    }
    return total;
}

CompletionResponse complete(Backend& backend, const CompletionRequest& request) {
    return backend.complete(request);
}

// ---------------------------------------------------------------------------
// Scripted backend
// ---------------------------------------------------------------------------

namespace {

class ScriptedBackend final : public Backend {
public:
    explicit ScriptedBackend(BackendConfig config) : config_(std::move(config)) {}

    CompletionResponse complete(const CompletionRequest& request) override {
        ScriptEntry entry;
        {
            std::lock_guard<std::mutex> lock(mutex_);
            if (cursor_ >= config_.script.size()) {
                if (config_.cycle_script && !config_.script.empty()) {
                    cursor_ = 0;
                } else {
                    throw ScriptExhausted("scripted backend '" + config_.backend_id +
                                          "' has no responses left (consumed " +
                                          std::to_string(cursor_) + ")");
                }
            }
            entry = config_.script[cursor_++];
        }
        if (entry.transport_error) {
            throw TransportError("scripted transport failure from '" + config_.backend_id + "'");
        }
        CompletionResponse response;
        response.text = entry.text;
        response.refused = entry.refuse;
        response.prompt_tokens = request_token_total(*this, request);
        response.completion_tokens = count_tokens(entry.text);
        response.answered_by = config_.backend_id;
        return response;
    }

    int count_tokens(const std::string& text) const override { return count_words(text); }

    const BackendConfig& config() const override { return config_; }

private:
    BackendConfig config_;
    mutable std::mutex mutex_;
    std::size_t cursor_ = 0;
};

// ---------------------------------------------------------------------------
// HTTP provider backend (OpenAI-style chat completions)
// ---------------------------------------------------------------------------

// Rate limiter state is shared across all instances with the same backend_id.
class RateLimiter {
public:
    void acquire(int min_interval_ms) {
        if (min_interval_ms <= 0) return;
        std::unique_lock<std::mutex> lock(mutex_);
        auto now = std::chrono::steady_clock::now();
        auto earliest = last_ + std::chrono::milliseconds(min_interval_ms);
        if (now < earliest) {
            lock.unlock();
            std::this_thread::sleep_for(earliest - now);
            lock.lock();
        }
        last_ = std::chrono::steady_clock::now();
    }

private:
    std::mutex mutex_;
    std::chrono::steady_clock::time_point last_{};
};

std::shared_ptr<RateLimiter> limiter_for(const std::string& backend_id) {
    static std::mutex registry_mutex;
    static std::map<std::string, std::shared_ptr<RateLimiter>> registry;
    std::lock_guard<std::mutex> lock(registry_mutex);
    auto& slot = registry[backend_id];
    if (!slot) slot = std::make_shared<RateLimiter>();
    return slot;
}

class HttpBackend final : public Backend {
public:
    explicit HttpBackend(BackendConfig config)
        : config_(std::move(config)), limiter_(limiter_for(config_.backend_id)) {
        if (!config_.endpoint) {
            throw ConfigError("backend '" + config_.backend_id + "': HttpProvider kind needs an endpoint");
        }
    }

    CompletionResponse complete(const CompletionRequest& request) override {
        const auto& ep = *config_.endpoint;
        limiter_->acquire(ep.min_interval_ms);

        nlohmann::json body;
        body["model"] = ep.model;
        nlohmann::json messages = nlohmann::json::array();
        messages.push_back({{"role", "system"}, {"content", request.system_text}});
        for (const auto& [speaker, text] : request.turns) {
            messages.push_back({{"role", speaker == Speaker::Self ? "assistant" : "user"},
                                {"content", text}});
        }
        body["messages"] = std::move(messages);
        if (request.temperature) body["temperature"] = *request.temperature;
        if (request.max_output_tokens) body["max_tokens"] = *request.max_output_tokens;

        httplib::Client client(ep.base_url);
        client.set_connection_timeout(ep.timeout_seconds, 0);
        client.set_read_timeout(ep.timeout_seconds, 0);
        httplib::Headers headers;
        if (!ep.api_key_env.empty()) {
            const char* key = std::getenv(ep.api_key_env.c_str());
            if (!key || !*key) {
                throw ConfigError("backend '" + config_.backend_id + "': environment variable " +
                                  ep.api_key_env + " is not set");
            }
            headers.emplace("Authorization", std::string("Bearer ") + key);
        }

        auto http_response = client.Post(ep.path, headers, body.dump(), "application/json");
        if (!http_response) {
            throw TransportError("backend '" + config_.backend_id + "': " +
                                 httplib::to_string(http_response.error()));
        }
        if (http_response->status >= 400) {
            bool retryable = http_response->status == 408 || http_response->status == 429 ||
                             http_response->status >= 500;
            throw TransportError("backend '" + config_.backend_id + "': HTTP " +
                                     std::to_string(http_response->status) + ": " + http_response->body,
                                 retryable);
        }

        nlohmann::json payload;
        try {
            payload = nlohmann::json::parse(http_response->body);
        } catch (const nlohmann::json::exception& e) {
            throw TransportError("backend '" + config_.backend_id +
                                 "': unparseable response body: " + e.what());
        }

        CompletionResponse response;
        response.answered_by = config_.backend_id;
        if (payload.contains("usage")) {
            response.prompt_tokens = payload["usage"].value("prompt_tokens", 0);
            response.completion_tokens = payload["usage"].value("completion_tokens", 0);
        }
        if (!payload.contains("choices") || payload["choices"].empty()) {
            response.refused = true;
            return response;
        }
        const auto& choice = payload["choices"][0];
        std::string finish = choice.value("finish_reason", "");
        if (choice.contains("message") && choice["message"].contains("content") &&
            choice["message"]["content"].is_string()) {
            response.text = choice["message"]["content"].get<std::string>();
        }
        // A safety decline shows up as a content_filter finish or empty text.
        if (finish == "content_filter" || (response.text.empty() && finish != "length")) {
            response.refused = true;
        }
        return response;
    }

    int count_tokens(const std::string& text) const override {
        return static_cast<int>((text.size() + 3) / 4);
    }

    const BackendConfig& config() const override { return config_; }

private:
    BackendConfig config_;
    std::shared_ptr<RateLimiter> limiter_;
};

}  // namespace

std::shared_ptr<Backend> make_backend(const BackendConfig& config) {
    switch (config.kind) {
        case BackendKind::Scripted: return std::make_shared<ScriptedBackend>(config);
        case BackendKind::HttpProvider: return std::make_shared<HttpBackend>(config);
    }
    throw ConfigError("backend '" + config.backend_id + "': unknown kind");
}

// ---------------------------------------------------------------------------
// Retry and fallback policy
// ---------------------------------------------------------------------------

namespace {

CompletionResponse complete_with_retries(Backend& backend, const CompletionRequest& request,
                                         const RetryPolicy& policy) {
    auto backoff = policy.initial_backoff;
    int attempts = std::max(1, policy.max_attempts);
    for (int attempt = 1;; ++attempt) {
        try {
            auto response = backend.complete(request);
            response.attempts = attempt;
            return response;
        } catch (const TransportError& e) {
            if (attempt >= attempts || !e.retryable) throw;
            log::debug("retrying '" + backend.id() + "' after transport error: " + e.what());
            if (backoff.count() > 0) std::this_thread::sleep_for(backoff);
            backoff = std::chrono::milliseconds(
                static_cast<std::int64_t>(static_cast<double>(backoff.count()) * policy.backoff_multiplier));
        }
    }
}

}  // namespace

CompletionResponse complete_with_policy(Backend& primary, Backend* fallback,
                                        const CompletionRequest& request,
                                        const RetryPolicy& policy) {
    auto response = complete_with_retries(primary, request, policy);
    if (response.refused && fallback != nullptr) {
        log::debug("'" + primary.id() + "' refused; consulting fallback '" + fallback->id() + "'");
        return complete_with_retries(*fallback, request, policy);
    }
    return response;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

void to_json(nlohmann::json& j, const ScriptEntry& entry) {
    j = nlohmann::json{{"text", entry.text}};
    if (entry.refuse) j["refuse"] = true;
    if (entry.transport_error) j["transport_error"] = true;
}

void from_json(const nlohmann::json& j, ScriptEntry& entry) {
    entry.text = j.value("text", std::string());
    entry.refuse = j.value("refuse", false);
    entry.transport_error = j.value("transport_error", false);
}

void to_json(nlohmann::json& j, const BackendConfig& config) {
    j = nlohmann::json{
        {"backend_id", config.backend_id},
        {"kind", config.kind == BackendKind::Scripted ? "Scripted" : "HttpProvider"},
        {"context_window_tokens", config.context_window_tokens},
    };
    if (config.endpoint) {
        const auto& ep = *config.endpoint;
        j["base_url"] = ep.base_url;
        j["path"] = ep.path;
        j["model"] = ep.model;
        j["api_key_env"] = ep.api_key_env;
        j["timeout_seconds"] = ep.timeout_seconds;
        j["min_interval_ms"] = ep.min_interval_ms;
    }
    if (!config.script.empty()) j["script"] = config.script;
    if (config.cycle_script) j["cycle"] = true;
}

void from_json(const nlohmann::json& j, BackendConfig& config) {
    config.backend_id = j.at("backend_id").get<std::string>();
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "Scripted") {
        config.kind = BackendKind::Scripted;
    } else if (kind == "HttpProvider") {
        config.kind = BackendKind::HttpProvider;
    } else {
        throw ConfigError("backend '" + config.backend_id + "': unknown kind '" + kind + "'");
    }
    config.context_window_tokens = j.value("context_window_tokens", 4096);
    if (config.kind == BackendKind::HttpProvider) {
        HttpEndpoint ep;
        ep.base_url = j.at("base_url").get<std::string>();
        ep.path = j.value("path", std::string("/v1/chat/completions"));
        ep.model = j.value("model", std::string());
        ep.api_key_env = j.value("api_key_env", std::string());
        ep.timeout_seconds = j.value("timeout_seconds", 120);
        ep.min_interval_ms = j.value("min_interval_ms", 0);
        config.endpoint = std::move(ep);
    }
    if (j.contains("script")) {
        config.script = j.at("script").get<std::vector<ScriptEntry>>();
    }
    config.cycle_script = j.value("cycle", false);
}

std::vector<ScriptEntry> parse_script_lines(const std::string& content) {
    std::vector<ScriptEntry> entries;
    std::istringstream in(content);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            entries.push_back(nlohmann::json::parse(line).get<ScriptEntry>());
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("script line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return entries;
}

}  // namespace debate
