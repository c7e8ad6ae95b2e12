#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "debate/agents.hpp"
#include "debate/runner.hpp"

namespace debate {

enum class VerificationStatus { Confirmed, Mismatch, Unknown };

std::string to_string(VerificationStatus status);
VerificationStatus verification_status_from_string(const std::string& text);

// One persuader turn paired as written-by-the-model draft vs helper
// rewrite. logical_text and fallacious_text only coincide when the helper
// returned the draft unchanged, which texts_identical flags.
struct ArgumentPair {
    std::string claim_id;
    int repetition = 0;
    int round_index = 0;
    std::string topic;
    std::string claim;
    // The persuader's pre-revision draft.
    std::string logical_text;
    // The helper's revision that replaced it.
    std::string fallacious_text;
    std::string fallacy_label;
    // Set when an independent check disagreed with fallacy_label.
    std::optional<std::string> verifier_label;
    VerificationStatus verified = VerificationStatus::Unknown;
    bool texts_identical = false;
};

void to_json(nlohmann::json& j, const ArgumentPair& pair);
void from_json(const nlohmann::json& j, ArgumentPair& pair);

// Collects one pair per revised persuader message (draft plus label present;
// openers are never revised) across every FallaciousHelper transcript in the
// store. Pure read: re-extraction returns identical pairs, ordered by
// (claim_id, repetition, round_index). Revised messages missing a label are
// skipped with a warning.
std::vector<ArgumentPair> extract_pairs(const ResultsStore& store);

// Asks the verifier backend to classify each fallacious_text into the
// taxonomy. Equal normalized labels confirm the pair; a different taxonomy
// name is a mismatch (the verifier's answer is kept); refusals, transport
// failures, and unrecognized answers leave the pair Unknown. Per-pair
// failures never abort the batch. Texts are never altered.
std::vector<ArgumentPair> verify_labels(std::vector<ArgumentPair> pairs, AgentConfig& verifier,
                                        const std::vector<std::string>& taxonomy =
                                            fallacy_taxonomy());

struct ExtractionSummary {
    int pairs = 0;
    int confirmed = 0;
    int mismatched = 0;
    int unknown = 0;
    // confirmed / pairs; 0 when there are no pairs.
    double confirmation_rate = 0.0;
};

void to_json(nlohmann::json& j, const ExtractionSummary& summary);

ExtractionSummary summarize_pairs(const std::vector<ArgumentPair>& pairs);

// One pair per line, UTF-8 JSONL.
std::string pairs_to_jsonl(const std::vector<ArgumentPair>& pairs);
std::vector<ArgumentPair> pairs_from_jsonl(const std::string& text);

// Writes pairs.jsonl atomically and appends the summary record to the
// store's manifest.
ExtractionSummary write_pairs_file(const ResultsStore& store,
                                   const std::filesystem::path& out_path,
                                   const std::vector<ArgumentPair>& pairs);

}  // namespace debate
