#include "debate/cli.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "debate/analysis.hpp"
#include "debate/extractor.hpp"
#include "debate/fsio.hpp"
#include "debate/log.hpp"

namespace debate {

namespace {

std::filesystem::path resolve_against(const std::filesystem::path& base,
                                      const std::string& value) {
    std::filesystem::path p(value);
    if (p.is_absolute()) return p.lexically_normal();
    return (base / p).lexically_normal();
}

}  // namespace

RunConfig load_run_config(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("cannot parse config " + path.string() + ": " + e.what());
    }

    RunConfig config;
    std::filesystem::path base = path.parent_path();
    try {
        config.plan = j.get<ExperimentPlan>();
        config.plan.dataset_path = resolve_against(base, config.plan.dataset_path).string();
        config.plan.output_dir = resolve_against(base, config.plan.output_dir).string();
        if (j.contains("templates_dir")) {
            config.templates_dir =
                resolve_against(base, j.at("templates_dir").get<std::string>());
        }
        if (j.contains("temperature")) config.temperature = j.at("temperature").get<double>();
        config.max_output_tokens = j.value("max_output_tokens", 512);
        if (j.contains("retry")) {
            const auto& r = j.at("retry");
            config.retry.max_attempts = r.value("max_attempts", 3);
            config.retry.initial_backoff =
                std::chrono::milliseconds(r.value("initial_backoff_ms", 250));
            config.retry.backoff_multiplier = r.value("backoff_multiplier", 2.0);
        }
        for (const auto& [role, entry] : j.at("backends").items()) {
            BackendConfig backend = entry.get<BackendConfig>();
            if (entry.contains("script_path")) {
                if (!backend.script.empty()) {
                    throw ConfigError("backend '" + role +
                                      "' has both script and script_path");
                }
                std::filesystem::path script =
                    resolve_against(base, entry.at("script_path").get<std::string>());
                backend.script = parse_script_lines(read_file(script));
            }
            config.backends[role] = std::move(backend);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    } catch (const ParseError& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return config;
}

void validate_run_config(const RunConfig& config) {
    validate_plan(config.plan);
    std::vector<std::string> needed{"persuader", "debater", "moderator_convinced",
                                    "moderator_topic", "moderator_pleasantry"};
    for (ScenarioKind scenario : config.plan.scenarios) {
        if (scenario == ScenarioKind::FallaciousHelper) needed.push_back("fallacious_helper");
        if (scenario == ScenarioKind::LogicalHelper) needed.push_back("logical_helper");
    }
    for (const auto& role : needed) {
        if (config.backends.find(role) == config.backends.end()) {
            throw ConfigError("no backend configured for role " + role);
        }
    }
}

DebateConfigFactory make_factory(const RunConfig& config) {
    auto shared = std::make_shared<const RunConfig>(config);
    return [shared](ScenarioKind scenario) {
        auto make = [&](const std::string& role) {
            auto it = shared->backends.find(role);
            if (it == shared->backends.end()) {
                throw ConfigError("no backend configured for role " + role);
            }
            return make_backend(it->second);
        };
        auto maybe = [&](const std::string& role) -> std::shared_ptr<Backend> {
            auto it = shared->backends.find(role);
            return it == shared->backends.end() ? nullptr : make_backend(it->second);
        };
        auto agent = [&](TemplateRole role, const std::string& key) {
            AgentConfig a;
            a.role = role;
            a.backend = make(key);
            a.fallback = maybe("fallback");
            a.prompt = load_template(role, shared->templates_dir);
            a.temperature = shared->temperature;
            a.max_output_tokens = shared->max_output_tokens;
            a.retry = shared->retry;
            return a;
        };

        DebateConfig debate;
        debate.scenario = scenario;
        debate.max_rounds = shared->plan.max_rounds;
        debate.persuader = agent(TemplateRole::Persuader, "persuader");
        if (scenario == ScenarioKind::FallaciousHelper) {
            debate.persuader.helper = std::make_shared<AgentConfig>(
                agent(TemplateRole::FallaciousHelper, "fallacious_helper"));
        } else if (scenario == ScenarioKind::LogicalHelper) {
            debate.persuader.helper = std::make_shared<AgentConfig>(
                agent(TemplateRole::LogicalHelper, "logical_helper"));
        }
        debate.debater = agent(TemplateRole::Debater, "debater");

        Moderator moderator;
        moderator.convinced_backend = make("moderator_convinced");
        moderator.topic_backend = make("moderator_topic");
        moderator.pleasantry_backend = make("moderator_pleasantry");
        moderator.fallback = maybe("moderator_fallback");
        moderator.convinced_prompt =
            load_template(TemplateRole::ModeratorConvinced, shared->templates_dir);
        moderator.topic_prompt = load_template(TemplateRole::ModeratorTopic, shared->templates_dir);
        moderator.pleasantry_prompt =
            load_template(TemplateRole::ModeratorPleasantry, shared->templates_dir);
        moderator.retry = shared->retry;
        debate.moderator = std::move(moderator);

        debate.summarizer_backend = maybe("summarizer");
        debate.summarizer_retry = shared->retry;
        return debate;
    };
}

namespace {

std::vector<ScenarioKind> parse_scenario_list(const std::string& csv) {
    std::vector<ScenarioKind> scenarios;
    std::istringstream in(csv);
    std::string name;
    while (std::getline(in, name, ',')) {
        if (name.empty()) continue;
        try {
            scenarios.push_back(scenario_from_string(name));
        } catch (const ParseError& e) {
            throw ConfigError(e.what());
        }
    }
    if (scenarios.empty()) throw ConfigError("--scenarios lists no scenario");
    return scenarios;
}

struct RunFlags {
    std::string config_path;
    std::string out_dir;
    std::string scenarios_csv;
    int repetitions = 0;
    int concurrency = 0;
    int max_rounds = 0;
    unsigned int seed = 0;
    bool dry_run = false;
};

int cmd_run(const RunFlags& flags, const CLI::App& cmd, std::ostream& out) {
    RunConfig config = load_run_config(flags.config_path);
    ExperimentPlan& plan = config.plan;
    if (cmd.count("--out") > 0) plan.output_dir = flags.out_dir;
    if (cmd.count("--scenarios") > 0) plan.scenarios = parse_scenario_list(flags.scenarios_csv);
    if (cmd.count("--repetitions") > 0) plan.repetitions = flags.repetitions;
    if (cmd.count("--concurrency") > 0) plan.concurrency_limit = flags.concurrency;
    if (cmd.count("--max-rounds") > 0) plan.max_rounds = flags.max_rounds;
    if (cmd.count("--seed") > 0) plan.seed = flags.seed;
    validate_run_config(config);

    if (flags.dry_run) {
        auto claims = load_claims(plan.dataset_path);
        ResultsStore store(plan.output_dir);
        int total = 0;
        int done = 0;
        for (const auto& claim : claims) {
            for (ScenarioKind scenario : plan.scenarios) {
                for (int rep = 0; rep < plan.repetitions; ++rep) {
                    std::string key = ResultsStore::key(claim.claim_id, scenario, rep);
                    ++total;
                    if (store.contains(key)) {
                        ++done;
                        out << "done: " << key << "\n";
                    } else {
                        out << "would run: " << key << "\n";
                    }
                }
            }
        }
        out << "planned " << total << " debates, " << (total - done) << " to run, " << done
            << " already stored\n";
        return 0;
    }

    RunStats stats = run_matrix(plan, make_factory(config));
    out << "executed " << stats.executed << " of " << stats.planned << " debates ("
        << stats.skipped << " already stored, " << stats.failed << " backend failures)\n";
    out << "results in " << plan.output_dir << "\n";
    return 0;
}

int cmd_analyze(const std::string& store_path, const std::string& out_override,
                std::ostream& out) {
    if (!std::filesystem::exists(store_path)) {
        throw ConfigError("no results store at " + store_path);
    }
    ResultsStore store(store_path);
    std::vector<DebateResult> results = store.load_all();
    MetricReport report = compute_report(results);
    std::filesystem::path out_dir =
        out_override.empty() ? store.root() / "analysis" : std::filesystem::path(out_override);
    export_report(report, results, out_dir);

    out << "results analyzed: " << results.size() << "\n";
    out << "opinion change rate: " << report.rq1_all.rate << " (" << report.rq1_all.numerator
        << "/" << report.rq1_all.denominator << ")\n";
    for (ScenarioKind scenario : kAllScenarios) {
        auto it = report.a1.find(scenario);
        if (it == report.a1.end()) continue;
        out << "success rate " << to_string(scenario) << ": " << it->second.rate << " (mean "
            << it->second.mean_count << " of " << it->second.claims << " claims)\n";
    }
    for (const auto& entry : report.relative_increase) {
        out << "relative increase " << entry.treatment << " vs " << entry.reference << ": "
            << entry.value << "\n";
    }
    out << "reports written to " << out_dir.string() << "\n";
    return 0;
}

int cmd_extract(const std::string& store_path, const std::string& out_override,
                const std::string& config_path, std::ostream& out) {
    if (!std::filesystem::exists(store_path)) {
        throw ConfigError("no results store at " + store_path);
    }
    ResultsStore store(store_path);
    std::vector<ArgumentPair> pairs = extract_pairs(store);

    if (!config_path.empty()) {
        RunConfig config = load_run_config(config_path);
        auto it = config.backends.find("verifier");
        if (it == config.backends.end()) {
            throw ConfigError("config has no verifier backend");
        }
        AgentConfig verifier;
        verifier.role = TemplateRole::Verifier;
        verifier.backend = make_backend(it->second);
        auto fallback = config.backends.find("fallback");
        if (fallback != config.backends.end()) {
            verifier.fallback = make_backend(fallback->second);
        }
        verifier.prompt = load_template(TemplateRole::Verifier, config.templates_dir);
        verifier.temperature = config.temperature;
        verifier.max_output_tokens = 16;
        verifier.retry = config.retry;
        pairs = verify_labels(std::move(pairs), verifier);
    } else {
        log::info("no verifier configured; labels left unverified");
    }

    std::filesystem::path out_path =
        out_override.empty() ? store.root() / "pairs.jsonl" : std::filesystem::path(out_override);
    ExtractionSummary summary = write_pairs_file(store, out_path, pairs);
    out << "extracted " << summary.pairs << " argument pairs (confirmed " << summary.confirmed
        << ", mismatched " << summary.mismatched << ", unknown " << summary.unknown << ")\n";
    out << "pairs written to " << out_path.string() << "\n";
    return 0;
}

int cmd_validate(const std::string& dataset_path, std::ostream& out) {
    std::vector<ClaimRecord> claims = load_claims(dataset_path);
    std::set<std::string> pair_ids;
    for (const auto& claim : claims) pair_ids.insert(claim.pair_id);
    out << "dataset OK: " << claims.size() << " claims, " << pair_ids.size()
        << " pro/con pairs\n";
    return 0;
}

}  // namespace

int dispatch(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multi-round persuasion debates between language-model agents", "debatebench"};
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("--verbose", verbose, "Log debug detail to stderr");

    RunFlags run_flags;
    CLI::App* run = app.add_subcommand(
        "run", "Run the claims x scenarios x repetitions debate matrix");
    run->add_option("--config", run_flags.config_path, "JSON run configuration file")->required();
    run->add_option("--out", run_flags.out_dir, "Override the configured output directory");
    run->add_option("--scenarios", run_flags.scenarios_csv,
                    "Comma-separated scenarios: NoHelper,FallaciousHelper,LogicalHelper");
    run->add_option("--repetitions", run_flags.repetitions,
                    "Debates per claim and scenario (default 3)");
    run->add_option("--concurrency", run_flags.concurrency,
                    "Debates in flight at once (default 1)");
    run->add_option("--max-rounds", run_flags.max_rounds, "Round cap per debate (default 10)");
    run->add_option("--seed", run_flags.seed, "Recorded in the manifest for reproducibility");
    run->add_flag("--dry-run", run_flags.dry_run,
                  "Print the matrix plan without contacting any backend");

    std::string analyze_store;
    std::string analyze_out;
    CLI::App* analyze =
        app.add_subcommand("analyze", "Compute susceptibility metrics from a results store");
    analyze->add_option("store", analyze_store, "Results store directory")->required();
    analyze->add_option("--out", analyze_out, "Report directory (default: <store>/analysis)");

    std::string extract_store;
    std::string extract_out;
    std::string extract_config;
    CLI::App* extract = app.add_subcommand(
        "extract", "Export draft/revision argument pairs from fallacious-helper debates");
    extract->add_option("store", extract_store, "Results store directory")->required();
    extract->add_option("--out", extract_out, "Output JSONL path (default: <store>/pairs.jsonl)");
    extract->add_option("--config", extract_config,
                        "Run configuration providing the verifier backend");

    std::string dataset_path;
    CLI::App* validate = app.add_subcommand("validate", "Check a claim dataset file");
    validate->add_option("dataset", dataset_path, "Claims JSONL file")->required();

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }
    if (verbose) log::set_level(log::Level::Debug);

    try {
        if (app.got_subcommand(run)) return cmd_run(run_flags, *run, out);
        if (app.got_subcommand(analyze)) return cmd_analyze(analyze_store, analyze_out, out);
        if (app.got_subcommand(extract)) {
            return cmd_extract(extract_store, extract_out, extract_config, out);
        }
        if (app.got_subcommand(validate)) return cmd_validate(dataset_path, out);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace debate
