#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>

#include "debate/agents.hpp"
#include "debate/backend.hpp"
#include "debate/memory.hpp"
#include "debate/model.hpp"
#include "debate/moderation.hpp"

namespace debate {

// Everything one debate needs. Backends are live instances so scripted
// cursors persist across rounds; build a fresh config per debate for
// reproducible replay.
struct DebateConfig {
    ScenarioKind scenario = ScenarioKind::NoHelper;
    int max_rounds = 10;
    AgentConfig persuader;  // persuader.helper present iff scenario != NoHelper
    AgentConfig debater;
    Moderator moderator;
    // Optional; without it an over-budget debate ends as BackendFailure.
    std::shared_ptr<Backend> summarizer_backend;
    RetryPolicy summarizer_retry;
};

struct DebateOutcome {
    DebateResult result;
    Transcript transcript;
};

// The persuader's canned opening message: topic line (omitted with a warning
// when the claim has no topic), claim and reason lines, then the opinion
// question. Claim and reason appear verbatim.
std::string build_opener(const ClaimRecord& claim);

// Runs the full debate loop: persuader turn, debater turn, the three
// subordinate checks, master decision; on termination the final stance is
// determined. Backend failures (after retries) are recorded as a
// BackendFailure result with stance Unknown rather than thrown.
DebateOutcome run_debate(const ClaimRecord& claim, DebateConfig& config, int repetition);

// ---------------------------------------------------------------------------
// Transcript persistence (one JSONL file per debate)
// ---------------------------------------------------------------------------

struct TranscriptFile {
    Transcript transcript;
    std::string topic;
    std::string claim;
    std::string reason;
    std::map<std::string, std::string> model_ids;
};

// "{claim_id}.{scenario}.{repetition}.jsonl" with path-hostile characters in
// the id replaced.
std::string transcript_file_name(const std::string& claim_id, ScenarioKind scenario,
                                 int repetition);

// A metadata header line followed by one message per line.
void write_transcript_file(const std::filesystem::path& path, const TranscriptFile& file);
TranscriptFile read_transcript_file(const std::filesystem::path& path);

}  // namespace debate
