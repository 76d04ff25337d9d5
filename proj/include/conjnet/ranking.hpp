#pragma once

#include <string>
#include <vector>

#include "conjnet/inference.hpp"

namespace conjnet {

// Per-trial matrix of query outcomes, every model over the same query set.
struct TrialResults {
    std::string trial_id;
    std::vector<std::string> query_cells;
    std::vector<std::vector<QueryStatus>> status;  // [model][query]
    std::vector<std::vector<double>> log_prob;     // [model][query]
};

struct ProbTable {
    std::vector<std::string> models;
    std::vector<TrialResults> trials;
};

struct Exclusion {
    std::string trial;
    std::string query_cell;
    std::string reason;
    std::vector<std::string> models_affected;
};

// Queries impossible for every model are dropped (likely data errors), as is
// any query incalculable for any model. Queries impossible for only some
// models stay: those models share the worst rank, which is the penalty the
// zeros deserve.
ProbTable apply_exclusions(const ProbTable& table, std::vector<Exclusion>* log = nullptr);

// Fractional ranks, 1 = highest log probability; ties share the average of
// the ranks they span, so the rank sum stays k(k+1)/2.
std::vector<double> fractional_ranks(const std::vector<double>& values);

// avg_T(m): mean over trials of the mean per-query rank of model m.
// Throws EmptyTrial when some trial has no queries left.
std::vector<double> avg_trial_ranking(const ProbTable& table);

// avg_P(m): mean over trials of the model's rank by total probability
// assigned to the trial's queries (linear-space sum, accumulated from logs).
std::vector<double> total_prob_ranking(const ProbTable& table);

struct RankReport {
    std::vector<std::string> models;
    std::vector<std::string> trial_ids;
    std::vector<std::vector<double>> avg_t_per_trial;  // [trial][model]
    std::vector<double> avg_t;                         // [model]
    std::vector<std::vector<double>> avg_p_per_trial;  // [trial][model]
    std::vector<double> avg_p;
    std::vector<Exclusion> exclusions;
};

// Applies exclusions, drops (and logs) trials left without queries, computes
// both metrics.
RankReport build_rank_report(const ProbTable& table);

// Fixture path: per-trial ranks given directly, averaged per model.
RankReport report_from_per_trial_ranks(const std::vector<std::string>& models,
                                       const std::vector<std::string>& trial_ids,
                                       const std::vector<std::vector<double>>& ranks);

// Scores rounded to two decimals for display, trailing zeros stripped.
std::string format_score(double score);

std::string render_report(const RankReport& report);      // aligned tables
std::string render_report_csv(const RankReport& report);  // delimited
std::string render_exclusions_csv(const std::vector<Exclusion>& exclusions);

}  // namespace conjnet
