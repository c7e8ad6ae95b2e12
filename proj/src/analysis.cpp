#include "debate/analysis.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "debate/fsio.hpp"
#include "debate/log.hpp"

namespace debate {

namespace {

OpinionChangeRate rq1_counts(const std::vector<DebateResult>& results) {
    OpinionChangeRate rq1;
    for (const auto& result : results) {
        if (result.initial_stance == Stance::Unknown) {
            ++rq1.excluded_unknown_initial;
            continue;
        }
        if (result.initial_stance != Stance::Disagree) continue;
        if (result.final_stance == Stance::Unknown) {
            ++rq1.excluded_unknown_final;
            continue;
        }
        ++rq1.denominator;
        if (result.final_stance == Stance::Agree) ++rq1.numerator;
    }
    if (rq1.denominator > 0) {
        rq1.rate = static_cast<double>(rq1.numerator) / static_cast<double>(rq1.denominator);
    }
    return rq1;
}

// claim -> repetition -> final stance, with completeness checks shared by
// the A1/A2/ablation paths.
struct ScenarioOutcomes {
    std::map<std::string, std::map<int, Stance>> by_claim;
    int repetitions = 0;
};

ScenarioOutcomes collect_scenario(const std::vector<DebateResult>& results,
                                  ScenarioKind scenario) {
    ScenarioOutcomes outcomes;
    int max_rep = -1;
    for (const auto& result : results) {
        if (result.scenario != scenario) continue;
        auto [it, inserted] =
            outcomes.by_claim[result.claim_id].emplace(result.repetition, result.final_stance);
        (void)it;
        if (!inserted) {
            throw ValidationError("duplicate result for " + result.claim_id + "." +
                                  to_string(scenario) + "." + std::to_string(result.repetition));
        }
        max_rep = std::max(max_rep, result.repetition);
    }
    if (outcomes.by_claim.empty()) {
        throw MissingRepetition("no results for scenario " + to_string(scenario));
    }
    outcomes.repetitions = max_rep + 1;
    for (const auto& [claim_id, reps] : outcomes.by_claim) {
        for (int rep = 0; rep < outcomes.repetitions; ++rep) {
            if (reps.find(rep) == reps.end()) {
                throw MissingRepetition("claim " + claim_id + " is missing repetition " +
                                        std::to_string(rep) + " for scenario " +
                                        to_string(scenario));
            }
        }
    }
    return outcomes;
}

}  // namespace

OpinionChangeRate rq1_opinion_change_rate(const std::vector<DebateResult>& results) {
    if (results.empty()) throw EmptyDenominator("no results to analyze");
    OpinionChangeRate rq1 = rq1_counts(results);
    if (rq1.denominator == 0) {
        throw EmptyDenominator("no initially-disagreeing debate has a known final stance");
    }
    return rq1;
}

SuccessStats a1_success_stats(const std::vector<DebateResult>& results, ScenarioKind scenario) {
    ScenarioOutcomes outcomes = collect_scenario(results, scenario);

    SuccessStats stats;
    stats.repetitions = outcomes.repetitions;
    stats.claims = static_cast<int>(outcomes.by_claim.size());
    stats.per_rep_successes.assign(outcomes.repetitions, 0);
    for (const auto& [claim_id, reps] : outcomes.by_claim) {
        (void)claim_id;
        for (const auto& [rep, stance] : reps) {
            if (stance == Stance::Agree) ++stats.per_rep_successes[rep];
            if (stance == Stance::Unknown) ++stats.unknown_final;
        }
    }

    double sum = 0.0;
    for (int successes : stats.per_rep_successes) sum += successes;
    stats.mean_count = sum / stats.repetitions;
    if (stats.repetitions > 1) {
        double squares = 0.0;
        for (int successes : stats.per_rep_successes) {
            double delta = successes - stats.mean_count;
            squares += delta * delta;
        }
        stats.sample_variance = squares / (stats.repetitions - 1);
    }
    stats.rate = stats.mean_count / stats.claims;
    return stats;
}

ConsistencyHistogram a2_histogram(const std::vector<DebateResult>& results,
                                  ScenarioKind scenario) {
    ScenarioOutcomes outcomes = collect_scenario(results, scenario);
    if (outcomes.repetitions != 3) {
        throw MissingRepetition("consistency histogram needs exactly 3 repetitions, scenario " +
                                to_string(scenario) + " has " +
                                std::to_string(outcomes.repetitions));
    }

    ConsistencyHistogram histogram;
    histogram.repetitions = outcomes.repetitions;
    histogram.claims = static_cast<int>(outcomes.by_claim.size());
    for (int bin = 0; bin <= 3; ++bin) histogram.counts[bin] = 0;
    for (const auto& [claim_id, reps] : outcomes.by_claim) {
        (void)claim_id;
        int successes = 0;
        for (const auto& [rep, stance] : reps) {
            (void)rep;
            if (stance == Stance::Agree) ++successes;
        }
        ++histogram.counts[successes];
    }
    for (const auto& [bin, count] : histogram.counts) {
        histogram.fractions[bin] = static_cast<double>(count) / histogram.claims;
    }
    return histogram;
}

double relative_increase(double p_treatment, double p_reference) {
    if (p_reference <= 0.0) {
        throw ZeroReference("relative increase needs a positive reference rate");
    }
    return (p_treatment - p_reference) / p_reference;
}

AblationCross ablation_cross(const std::vector<DebateResult>& results, ScenarioKind scenario_a,
                             ScenarioKind scenario_b) {
    ScenarioOutcomes a = collect_scenario(results, scenario_a);
    ScenarioOutcomes b = collect_scenario(results, scenario_b);
    if (a.repetitions != b.repetitions) {
        throw MissingRepetition("scenarios " + to_string(scenario_a) + " and " +
                                to_string(scenario_b) + " ran different repetition counts");
    }
    for (const auto& [claim_id, reps] : a.by_claim) {
        (void)reps;
        if (b.by_claim.find(claim_id) == b.by_claim.end()) {
            throw MissingRepetition("claim " + claim_id + " has no " + to_string(scenario_b) +
                                    " results");
        }
    }
    for (const auto& [claim_id, reps] : b.by_claim) {
        (void)reps;
        if (a.by_claim.find(claim_id) == a.by_claim.end()) {
            throw MissingRepetition("claim " + claim_id + " has no " + to_string(scenario_a) +
                                    " results");
        }
    }

    AblationCross cross;
    cross.repetitions = a.repetitions;
    cross.claims = static_cast<int>(a.by_claim.size());
    double fail_success_sum = 0.0;
    double success_fail_sum = 0.0;
    for (int rep = 0; rep < cross.repetitions; ++rep) {
        int fail_success = 0;
        int success_fail = 0;
        for (const auto& [claim_id, reps_a] : a.by_claim) {
            Stance stance_a = reps_a.at(rep);
            Stance stance_b = b.by_claim.at(claim_id).at(rep);
            bool a_success = stance_a == Stance::Agree;
            bool b_success = stance_b == Stance::Agree;
            if (!a_success && b_success) ++fail_success;
            if (a_success && !b_success) ++success_fail;
        }
        fail_success_sum += fail_success;
        success_fail_sum += success_fail;
    }
    cross.a_fail_b_success_pct = fail_success_sum / cross.repetitions / cross.claims * 100.0;
    cross.a_success_b_fail_pct = success_fail_sum / cross.repetitions / cross.claims * 100.0;
    return cross;
}

MetricReport compute_report(const std::vector<DebateResult>& results) {
    MetricReport report;
    report.rq1_all = rq1_opinion_change_rate(results);

    std::map<std::string, std::vector<DebateResult>> by_debater;
    for (const auto& result : results) {
        auto it = result.model_ids.find("debater");
        std::string debater = it == result.model_ids.end() ? "unknown" : it->second;
        by_debater[debater].push_back(result);
    }
    for (const auto& [debater, group] : by_debater) {
        report.rq1_by_debater[debater] = rq1_counts(group);
    }

    std::set<ScenarioKind> present;
    for (const auto& result : results) present.insert(result.scenario);
    for (ScenarioKind scenario : kAllScenarios) {
        if (present.find(scenario) == present.end()) continue;
        report.a1[scenario] = a1_success_stats(results, scenario);
        try {
            report.a2[scenario] = a2_histogram(results, scenario);
        } catch (const MissingRepetition& e) {
            log::info(std::string("consistency histogram skipped: ") + e.what());
        }
    }

    auto a1_rate = [&report](ScenarioKind scenario) -> const SuccessStats* {
        auto it = report.a1.find(scenario);
        return it == report.a1.end() ? nullptr : &it->second;
    };
    const SuccessStats* fallacious = a1_rate(ScenarioKind::FallaciousHelper);
    for (ScenarioKind reference : {ScenarioKind::NoHelper, ScenarioKind::LogicalHelper}) {
        const SuccessStats* base = a1_rate(reference);
        if (fallacious == nullptr || base == nullptr || base->rate <= 0.0) continue;
        RelativeIncreaseEntry entry;
        entry.treatment = to_string(ScenarioKind::FallaciousHelper);
        entry.reference = to_string(reference);
        entry.treatment_rate = fallacious->rate;
        entry.reference_rate = base->rate;
        entry.value = relative_increase(fallacious->rate, base->rate);
        report.relative_increase.push_back(entry);
    }

    if (a1_rate(ScenarioKind::LogicalHelper) != nullptr && fallacious != nullptr) {
        std::string key = to_string(ScenarioKind::LogicalHelper) + "_vs_" +
                          to_string(ScenarioKind::FallaciousHelper);
        report.ablation[key] = ablation_cross(results, ScenarioKind::LogicalHelper,
                                              ScenarioKind::FallaciousHelper);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

namespace {

std::string fmt(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.12g", value);
    return buffer;
}

// Quotes a CSV field only when it needs it, so plain ids stay byte-stable.
std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"\n") == std::string::npos) return value;
    std::string quoted = "\"";
    for (char c : value) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += "\"";
    return quoted;
}

std::string metrics_csv(const MetricReport& report) {
    std::ostringstream out;
    out << "metric,scope,value\n";
    auto row = [&out](const std::string& metric, const std::string& scope,
                      const std::string& value) {
        out << metric << "," << csv_field(scope) << "," << value << "\n";
    };

    row("rq1_opinion_change_rate", "all", fmt(report.rq1_all.rate));
    row("rq1_numerator", "all", std::to_string(report.rq1_all.numerator));
    row("rq1_denominator", "all", std::to_string(report.rq1_all.denominator));
    row("rq1_excluded_unknown_final", "all",
        std::to_string(report.rq1_all.excluded_unknown_final));
    row("rq1_excluded_unknown_initial", "all",
        std::to_string(report.rq1_all.excluded_unknown_initial));
    for (const auto& [debater, rq1] : report.rq1_by_debater) {
        row("rq1_opinion_change_rate", "debater:" + debater, fmt(rq1.rate));
        row("rq1_denominator", "debater:" + debater, std::to_string(rq1.denominator));
    }

    for (ScenarioKind scenario : kAllScenarios) {
        auto it = report.a1.find(scenario);
        if (it == report.a1.end()) continue;
        const SuccessStats& stats = it->second;
        row("a1_mean_success_count", to_string(scenario), fmt(stats.mean_count));
        row("a1_sample_variance", to_string(scenario), fmt(stats.sample_variance));
        row("a1_success_rate", to_string(scenario), fmt(stats.rate));
        row("a1_unknown_final", to_string(scenario), std::to_string(stats.unknown_final));
    }

    for (ScenarioKind scenario : kAllScenarios) {
        auto it = report.a2.find(scenario);
        if (it == report.a2.end()) continue;
        const ConsistencyHistogram& histogram = it->second;
        for (const auto& [bin, count] : histogram.counts) {
            row("a2_count_" + std::to_string(bin), to_string(scenario), std::to_string(count));
        }
        for (const auto& [bin, fraction] : histogram.fractions) {
            row("a2_fraction_" + std::to_string(bin), to_string(scenario), fmt(fraction));
        }
    }

    for (const auto& entry : report.relative_increase) {
        row("relative_increase", entry.treatment + "_vs_" + entry.reference, fmt(entry.value));
    }

    for (const auto& [key, cross] : report.ablation) {
        row("ablation_fail_success_pct", key, fmt(cross.a_fail_b_success_pct));
        row("ablation_success_fail_pct", key, fmt(cross.a_success_b_fail_pct));
    }
    return out.str();
}

std::string per_claim_csv(const std::vector<DebateResult>& results) {
    int repetitions = 0;
    for (const auto& result : results) {
        repetitions = std::max(repetitions, result.repetition + 1);
    }

    std::map<std::string, std::map<ScenarioKind, std::map<int, Stance>>> table;
    for (const auto& result : results) {
        table[result.claim_id][result.scenario][result.repetition] = result.final_stance;
    }

    std::ostringstream out;
    out << "claim_id,scenario,successes";
    for (int rep = 0; rep < repetitions; ++rep) out << ",rep" << rep;
    out << "\n";
    for (const auto& [claim_id, scenarios] : table) {
        for (ScenarioKind scenario : kAllScenarios) {
            auto it = scenarios.find(scenario);
            if (it == scenarios.end()) continue;
            int successes = 0;
            for (const auto& [rep, stance] : it->second) {
                (void)rep;
                if (stance == Stance::Agree) ++successes;
            }
            out << csv_field(claim_id) << "," << to_string(scenario) << "," << successes;
            for (int rep = 0; rep < repetitions; ++rep) {
                auto stance = it->second.find(rep);
                out << "," << (stance == it->second.end() ? "" : to_string(stance->second));
            }
            out << "\n";
        }
    }
    return out.str();
}

std::string plot_data_csv(const MetricReport& report) {
    std::ostringstream out;
    out << "success_count,scenario,claims,fraction\n";
    for (int bin = 0; bin <= 3; ++bin) {
        for (ScenarioKind scenario : kAllScenarios) {
            auto it = report.a2.find(scenario);
            if (it == report.a2.end()) continue;
            out << bin << "," << to_string(scenario) << "," << it->second.counts.at(bin) << ","
                << fmt(it->second.fractions.at(bin)) << "\n";
        }
    }
    return out.str();
}

}  // namespace

void export_report(const MetricReport& report, const std::vector<DebateResult>& results,
                   const std::filesystem::path& out_dir) {
    if (results.empty()) throw EmptyDenominator("no results to export");
    write_file_atomic(out_dir / "metrics.csv", metrics_csv(report));
    write_file_atomic(out_dir / "per_claim.csv", per_claim_csv(results));
    write_file_atomic(out_dir / "plot_data.csv", plot_data_csv(report));
}

}  // namespace debate
