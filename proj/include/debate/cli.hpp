#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "debate/backend.hpp"
#include "debate/runner.hpp"

namespace debate {

// The experiment plan plus everything needed to build per-debate agents.
// Role keys in `backends`: persuader, debater, fallacious_helper,
// logical_helper, moderator_convinced, moderator_topic, moderator_pleasantry,
// and optionally moderator_fallback, fallback, summarizer, verifier.
struct RunConfig {
    ExperimentPlan plan;
    // Empty means the built-in prompt templates.
    std::filesystem::path templates_dir;
    std::map<std::string, BackendConfig> backends;
    std::optional<double> temperature;
    int max_output_tokens = 512;
    RetryPolicy retry;
};

// Parses the JSON config file. Relative paths inside (dataset, output,
// templates, script files) resolve against the config file's directory.
// Scripted backends may inline "script" entries or point "script_path" at a
// JSONL file of entries.
RunConfig load_run_config(const std::filesystem::path& path);

// Checks that every role the plan's scenarios need has a backend.
void validate_run_config(const RunConfig& config);

// Builds fresh backend instances on every call so each debate replays
// scripts from the top.
DebateConfigFactory make_factory(const RunConfig& config);

// Parses argv (program name excluded) and runs the selected subcommand.
// Exit status: 0 success, 1 invalid data or analysis failure, 2 usage or
// configuration errors.
int dispatch(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace debate
