#include "debate/extractor.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

#include "debate/engine.hpp"
#include "debate/fsio.hpp"
#include "debate/log.hpp"

namespace debate {

std::string to_string(VerificationStatus status) {
    switch (status) {
        case VerificationStatus::Confirmed: return "Confirmed";
        case VerificationStatus::Mismatch: return "Mismatch";
        case VerificationStatus::Unknown: return "Unknown";
    }
    return "Unknown";
}

VerificationStatus verification_status_from_string(const std::string& text) {
    if (text == "Confirmed") return VerificationStatus::Confirmed;
    if (text == "Mismatch") return VerificationStatus::Mismatch;
    if (text == "Unknown") return VerificationStatus::Unknown;
    throw ParseError("unknown verification status: " + text);
}

void to_json(nlohmann::json& j, const ArgumentPair& pair) {
    j = nlohmann::json{
        {"pair_key",
         {{"claim_id", pair.claim_id},
          {"repetition", pair.repetition},
          {"round_index", pair.round_index}}},
        {"topic", pair.topic},
        {"claim", pair.claim},
        {"logical_text", pair.logical_text},
        {"fallacious_text", pair.fallacious_text},
        {"fallacy_label", pair.fallacy_label},
        {"verified", to_string(pair.verified)},
        {"texts_identical", pair.texts_identical},
    };
    if (pair.verifier_label) j["verifier_label"] = *pair.verifier_label;
}

void from_json(const nlohmann::json& j, ArgumentPair& pair) {
    const auto& key = j.at("pair_key");
    key.at("claim_id").get_to(pair.claim_id);
    key.at("repetition").get_to(pair.repetition);
    key.at("round_index").get_to(pair.round_index);
    j.at("topic").get_to(pair.topic);
    j.at("claim").get_to(pair.claim);
    j.at("logical_text").get_to(pair.logical_text);
    j.at("fallacious_text").get_to(pair.fallacious_text);
    j.at("fallacy_label").get_to(pair.fallacy_label);
    pair.verified = verification_status_from_string(j.at("verified").get<std::string>());
    j.at("texts_identical").get_to(pair.texts_identical);
    if (j.contains("verifier_label")) {
        pair.verifier_label = j.at("verifier_label").get<std::string>();
    } else {
        pair.verifier_label.reset();
    }
}

std::vector<ArgumentPair> extract_pairs(const ResultsStore& store) {
    std::vector<DebateResult> results;
    for (const auto& result : store.load_all()) {
        if (result.scenario == ScenarioKind::FallaciousHelper) results.push_back(result);
    }
    std::sort(results.begin(), results.end(), [](const DebateResult& a, const DebateResult& b) {
        return std::tie(a.claim_id, a.repetition) < std::tie(b.claim_id, b.repetition);
    });

    std::vector<ArgumentPair> pairs;
    for (const auto& result : results) {
        std::string key = ResultsStore::key(result);
        TranscriptFile file = read_transcript_file(store.transcript_path(key));
        for (const auto& message : file.transcript.messages) {
            if (message.author != MessageAuthor::Persuader) continue;
            if (!message.draft_text) continue;
            if (message.round_index < 2) continue;
            if (!message.fallacy_label || message.fallacy_label->empty()) {
                log::warn("skipping revised message without a fallacy label: " + key +
                          " round " + std::to_string(message.round_index));
                continue;
            }
            ArgumentPair pair;
            pair.claim_id = result.claim_id;
            pair.repetition = result.repetition;
            pair.round_index = message.round_index;
            pair.topic = file.topic;
            pair.claim = file.claim;
            pair.logical_text = *message.draft_text;
            pair.fallacious_text = message.text;
            pair.fallacy_label = *message.fallacy_label;
            pair.texts_identical = pair.logical_text == pair.fallacious_text;
            if (pair.texts_identical) {
                log::warn("helper returned the draft unchanged: " + key + " round " +
                          std::to_string(message.round_index));
            }
            pairs.push_back(std::move(pair));
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const ArgumentPair& a, const ArgumentPair& b) {
        return std::tie(a.claim_id, a.repetition, a.round_index) <
               std::tie(b.claim_id, b.repetition, b.round_index);
    });
    return pairs;
}

std::vector<ArgumentPair> verify_labels(std::vector<ArgumentPair> pairs, AgentConfig& verifier,
                                        const std::vector<std::string>& taxonomy) {
    if (!verifier.backend) throw ConfigError("verifier backend not configured");

    std::vector<std::string> normalized_taxonomy;
    normalized_taxonomy.reserve(taxonomy.size());
    for (const auto& name : taxonomy) normalized_taxonomy.push_back(normalize_fallacy_label(name));

    for (auto& pair : pairs) {
        ClaimRecord record;
        record.claim_id = pair.claim_id;
        record.topic = pair.topic;
        record.claim = pair.claim;

        CompletionRequest request;
        request.system_text = render_template(verifier.prompt, record);
        request.turns.emplace_back(Speaker::Other, pair.fallacious_text);
        request.temperature = verifier.temperature;
        request.max_output_tokens = verifier.max_output_tokens;

        CompletionResponse response;
        try {
            response = complete_with_policy(*verifier.backend, verifier.fallback.get(), request,
                                            verifier.retry);
        } catch (const DebateFailure& e) {
            log::warn(std::string("verification failed for ") + pair.claim_id + " rep " +
                      std::to_string(pair.repetition) + " round " +
                      std::to_string(pair.round_index) + ": " + e.what());
            pair.verified = VerificationStatus::Unknown;
            continue;
        }
        if (response.refused) {
            pair.verified = VerificationStatus::Unknown;
            continue;
        }

        std::string answer = normalize_fallacy_label(response.text);
        if (answer == normalize_fallacy_label(pair.fallacy_label)) {
            pair.verified = VerificationStatus::Confirmed;
            continue;
        }
        bool on_taxonomy = std::find(normalized_taxonomy.begin(), normalized_taxonomy.end(),
                                     answer) != normalized_taxonomy.end();
        if (on_taxonomy) {
            pair.verified = VerificationStatus::Mismatch;
            pair.verifier_label = answer;
        } else {
            log::debug("unrecognized verifier answer: " + response.text);
            pair.verified = VerificationStatus::Unknown;
        }
    }
    return pairs;
}

void to_json(nlohmann::json& j, const ExtractionSummary& summary) {
    j = nlohmann::json{
        {"type", "extraction_summary"},
        {"pairs", summary.pairs},
        {"confirmed", summary.confirmed},
        {"mismatched", summary.mismatched},
        {"unknown", summary.unknown},
        {"confirmation_rate", summary.confirmation_rate},
    };
}

ExtractionSummary summarize_pairs(const std::vector<ArgumentPair>& pairs) {
    ExtractionSummary summary;
    summary.pairs = static_cast<int>(pairs.size());
    for (const auto& pair : pairs) {
        switch (pair.verified) {
            case VerificationStatus::Confirmed: ++summary.confirmed; break;
            case VerificationStatus::Mismatch: ++summary.mismatched; break;
            case VerificationStatus::Unknown: ++summary.unknown; break;
        }
    }
    if (summary.pairs > 0) {
        summary.confirmation_rate =
            static_cast<double>(summary.confirmed) / static_cast<double>(summary.pairs);
    }
    return summary;
}

std::string pairs_to_jsonl(const std::vector<ArgumentPair>& pairs) {
    std::ostringstream out;
    for (const auto& pair : pairs) {
        out << nlohmann::json(pair).dump() << "\n";
    }
    return out.str();
}

std::vector<ArgumentPair> pairs_from_jsonl(const std::string& text) {
    std::vector<ArgumentPair> pairs;
    std::istringstream in(text);
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        try {
            pairs.push_back(nlohmann::json::parse(line).get<ArgumentPair>());
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("bad pair record at line " + std::to_string(line_number) + ": " +
                             e.what());
        }
    }
    return pairs;
}

ExtractionSummary write_pairs_file(const ResultsStore& store,
                                   const std::filesystem::path& out_path,
                                   const std::vector<ArgumentPair>& pairs) {
    write_file_atomic(out_path, pairs_to_jsonl(pairs));
    ExtractionSummary summary = summarize_pairs(pairs);
    store.append_manifest_record(nlohmann::json(summary));
    return summary;
}

}  // namespace debate
