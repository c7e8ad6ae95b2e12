#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "debate/errors.hpp"
#include "debate/model.hpp"

namespace debate {

// Opinion-change rate over initially-disagreeing debates. Debates with an
// Unknown initial or final stance sit outside both numerator and
// denominator; their counts are kept for the report.
struct OpinionChangeRate {
    double rate = 0.0;
    int numerator = 0;
    int denominator = 0;
    int excluded_unknown_final = 0;
    int excluded_unknown_initial = 0;
};

// Per-repetition success counts for one scenario. A success is a final
// stance of Agree; Unknown finals count as not convinced (tracked).
struct SuccessStats {
    double mean_count = 0.0;
    double sample_variance = 0.0;
    double rate = 0.0;
    int repetitions = 0;
    int claims = 0;
    std::vector<int> per_rep_successes;
    int unknown_final = 0;
};

// Distribution of per-claim success counts over the repetitions (bins 0..R).
struct ConsistencyHistogram {
    std::map<int, int> counts;
    std::map<int, double> fractions;
    int claims = 0;
    int repetitions = 0;
};

struct RelativeIncreaseEntry {
    std::string treatment;
    std::string reference;
    double treatment_rate = 0.0;
    double reference_rate = 0.0;
    double value = 0.0;
};

// Per-repetition disagreement between two scenarios, averaged and expressed
// as a percentage of claims.
struct AblationCross {
    double a_fail_b_success_pct = 0.0;
    double a_success_b_fail_pct = 0.0;
    int repetitions = 0;
    int claims = 0;
};

struct MetricReport {
    OpinionChangeRate rq1_all;
    // Keyed by the debater's backend identifier.
    std::map<std::string, OpinionChangeRate> rq1_by_debater;
    std::map<ScenarioKind, SuccessStats> a1;
    std::map<ScenarioKind, ConsistencyHistogram> a2;
    std::vector<RelativeIncreaseEntry> relative_increase;
    // Keyed "<scenarioA>_vs_<scenarioB>".
    std::map<std::string, AblationCross> ablation;
};

OpinionChangeRate rq1_opinion_change_rate(const std::vector<DebateResult>& results);

SuccessStats a1_success_stats(const std::vector<DebateResult>& results, ScenarioKind scenario);

// Requires exactly three repetitions per claim.
ConsistencyHistogram a2_histogram(const std::vector<DebateResult>& results,
                                  ScenarioKind scenario);

// (treatment - reference) / reference; reference must be positive.
double relative_increase(double p_treatment, double p_reference);

AblationCross ablation_cross(const std::vector<DebateResult>& results, ScenarioKind scenario_a,
                             ScenarioKind scenario_b);

// Every metric the stored results support: RQ1 overall and per debater
// backend, A1/A2 per scenario present, the helper-vs-baseline relative
// increases (against both NoHelper and LogicalHelper), and the
// logical-vs-fallacious ablation when both scenarios are present.
MetricReport compute_report(const std::vector<DebateResult>& results);

// Writes metrics.csv, per_claim.csv, and plot_data.csv into out_dir with a
// fixed row order; re-export is byte-identical.
void export_report(const MetricReport& report, const std::vector<DebateResult>& results,
                   const std::filesystem::path& out_dir);

}  // namespace debate
