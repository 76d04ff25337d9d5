#include "conjnet/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "conjnet/csv.hpp"
#include "conjnet/errors.hpp"
#include "conjnet/numeric.hpp"

namespace conjnet {

ProbTable apply_exclusions(const ProbTable& table, std::vector<Exclusion>* log) {
    ProbTable out;
    out.models = table.models;
    const size_t k = table.models.size();
    for (const TrialResults& trial : table.trials) {
        for (size_t m = 0; m < k; ++m) {
            if (trial.status[m].size() != trial.query_cells.size() ||
                trial.log_prob[m].size() != trial.query_cells.size())
                throw Error(Error::Kind::DataError,
                            "ragged result table for trial " + trial.trial_id);
        }
        TrialResults kept;
        kept.trial_id = trial.trial_id;
        kept.status.resize(k);
        kept.log_prob.resize(k);
        for (size_t q = 0; q < trial.query_cells.size(); ++q) {
            bool any_incalculable = false;
            bool all_impossible = true;
            std::vector<std::string> incalculable_models, impossible_models;
            for (size_t m = 0; m < k; ++m) {
                if (trial.status[m][q] == QueryStatus::Incalculable) {
                    any_incalculable = true;
                    incalculable_models.push_back(table.models[m]);
                }
                if (trial.status[m][q] == QueryStatus::Impossible)
                    impossible_models.push_back(table.models[m]);
                else
                    all_impossible = false;
            }
            if (any_incalculable) {
                if (log)
                    log->push_back({trial.trial_id, trial.query_cells[q],
                                    "incalculable-for-some", incalculable_models});
                continue;
            }
            if (all_impossible) {
                if (log)
                    log->push_back({trial.trial_id, trial.query_cells[q],
                                    "impossible-for-all", impossible_models});
                continue;
            }
            kept.query_cells.push_back(trial.query_cells[q]);
            for (size_t m = 0; m < k; ++m) {
                kept.status[m].push_back(trial.status[m][q]);
                kept.log_prob[m].push_back(trial.log_prob[m][q]);
            }
        }
        out.trials.push_back(std::move(kept));
    }
    return out;
}

std::vector<double> fractional_ranks(const std::vector<double>& values) {
    const size_t k = values.size();
    std::vector<size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return values[a] > values[b]; });
    std::vector<double> ranks(k, 0.0);
    size_t i = 0;
    while (i < k) {
        size_t j = i;
        while (j + 1 < k && values[order[j + 1]] == values[order[i]]) ++j;
        const double shared = 0.5 * static_cast<double>(i + j) + 1.0;  // average of i+1..j+1
        for (size_t t = i; t <= j; ++t) ranks[order[t]] = shared;
        i = j + 1;
    }
    return ranks;
}

namespace {

std::vector<std::vector<double>> per_trial_mean_ranks(const ProbTable& table) {
    const size_t k = table.models.size();
    std::vector<std::vector<double>> per_trial;
    for (const TrialResults& trial : table.trials) {
        const size_t nq = trial.query_cells.size();
        if (nq == 0)
            throw Error(Error::Kind::EmptyTrial,
                        "trial " + trial.trial_id + " has no queries after exclusions");
        std::vector<double> mean(k, 0.0);
        std::vector<double> column(k);
        for (size_t q = 0; q < nq; ++q) {
            for (size_t m = 0; m < k; ++m) column[m] = trial.log_prob[m][q];
            const std::vector<double> ranks = fractional_ranks(column);
            for (size_t m = 0; m < k; ++m) mean[m] += ranks[m];
        }
        for (size_t m = 0; m < k; ++m) mean[m] /= static_cast<double>(nq);
        per_trial.push_back(std::move(mean));
    }
    return per_trial;
}

std::vector<std::vector<double>> per_trial_total_ranks(const ProbTable& table) {
    const size_t k = table.models.size();
    std::vector<std::vector<double>> per_trial;
    for (const TrialResults& trial : table.trials) {
        if (trial.query_cells.empty())
            throw Error(Error::Kind::EmptyTrial,
                        "trial " + trial.trial_id + " has no queries after exclusions");
        std::vector<double> totals(k);
        for (size_t m = 0; m < k; ++m) totals[m] = logsumexp(trial.log_prob[m]);
        per_trial.push_back(fractional_ranks(totals));
    }
    return per_trial;
}

std::vector<double> average_over_trials(const std::vector<std::vector<double>>& per_trial,
                                        size_t k) {
    std::vector<double> avg(k, 0.0);
    if (per_trial.empty()) return avg;
    for (const auto& row : per_trial)
        for (size_t m = 0; m < k; ++m) avg[m] += row[m];
    for (size_t m = 0; m < k; ++m) avg[m] /= static_cast<double>(per_trial.size());
    return avg;
}

}  // namespace

std::vector<double> avg_trial_ranking(const ProbTable& table) {
    return average_over_trials(per_trial_mean_ranks(table), table.models.size());
}

std::vector<double> total_prob_ranking(const ProbTable& table) {
    return average_over_trials(per_trial_total_ranks(table), table.models.size());
}

RankReport build_rank_report(const ProbTable& table) {
    RankReport report;
    report.models = table.models;
    ProbTable filtered = apply_exclusions(table, &report.exclusions);
    ProbTable usable;
    usable.models = filtered.models;
    for (TrialResults& trial : filtered.trials) {
        if (trial.query_cells.empty()) {
            report.exclusions.push_back({trial.trial_id, "*", "empty-trial", {}});
            continue;
        }
        usable.trials.push_back(std::move(trial));
    }
    for (const TrialResults& trial : usable.trials) report.trial_ids.push_back(trial.trial_id);
    report.avg_t_per_trial = per_trial_mean_ranks(usable);
    report.avg_t = average_over_trials(report.avg_t_per_trial, usable.models.size());
    report.avg_p_per_trial = per_trial_total_ranks(usable);
    report.avg_p = average_over_trials(report.avg_p_per_trial, usable.models.size());
    return report;
}

RankReport report_from_per_trial_ranks(const std::vector<std::string>& models,
                                       const std::vector<std::string>& trial_ids,
                                       const std::vector<std::vector<double>>& ranks) {
    RankReport report;
    report.models = models;
    report.trial_ids = trial_ids;
    report.avg_p_per_trial = ranks;
    report.avg_p = average_over_trials(ranks, models.size());
    report.avg_t_per_trial = ranks;
    report.avg_t = report.avg_p;
    return report;
}

std::string format_score(double score) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.2f", score);
    std::string s = buf;
    if (s.find('.') != std::string::npos) {
        while (!s.empty() && s.back() == '0') s.pop_back();
        if (!s.empty() && s.back() == '.') s.pop_back();
    }
    return s;
}

namespace {

// Models sorted by average score (ascending = better), stable on ties.
std::vector<size_t> order_by(const std::vector<double>& avg) {
    std::vector<size_t> order(avg.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return avg[a] < avg[b]; });
    return order;
}

void render_metric_table(std::ostringstream& out, const std::string& title,
                         const RankReport& report,
                         const std::vector<std::vector<double>>& per_trial,
                         const std::vector<double>& avg) {
    size_t name_w = 5;
    for (const auto& m : report.models) name_w = std::max(name_w, m.size());
    out << title << "\n";
    out << std::string(name_w, ' ');
    for (const auto& t : report.trial_ids) out << "  " << t;
    out << "  Average\n";
    for (size_t idx : order_by(avg)) {
        out << report.models[idx] << std::string(name_w - report.models[idx].size(), ' ');
        for (size_t t = 0; t < report.trial_ids.size(); ++t) {
            const std::string v = format_score(per_trial[t][idx]);
            const size_t w = report.trial_ids[t].size();
            out << "  " << std::string(w > v.size() ? w - v.size() : 0, ' ') << v;
        }
        out << "  " << format_score(avg[idx]) << "\n";
    }
    out << "\n";
}

}  // namespace

std::string render_report(const RankReport& report) {
    std::ostringstream out;
    render_metric_table(out, "Average Trial Ranking", report, report.avg_t_per_trial,
                        report.avg_t);
    render_metric_table(out, "Total Probability Ranking", report, report.avg_p_per_trial,
                        report.avg_p);

    // ordinal comparison of the two metrics
    const auto t_order = order_by(report.avg_t);
    const auto p_order = order_by(report.avg_p);
    std::vector<size_t> t_pos(report.models.size()), p_pos(report.models.size());
    for (size_t i = 0; i < t_order.size(); ++i) t_pos[t_order[i]] = i + 1;
    for (size_t i = 0; i < p_order.size(); ++i) p_pos[p_order[i]] = i + 1;
    size_t name_w = 5;
    for (const auto& m : report.models) name_w = std::max(name_w, m.size());
    out << "Metric Comparison\n";
    out << std::string(name_w, ' ') << "  Average Trial  Total Probability\n";
    for (size_t idx : t_order) {
        const std::string t = std::to_string(t_pos[idx]);
        const std::string p = std::to_string(p_pos[idx]);
        out << report.models[idx] << std::string(name_w - report.models[idx].size(), ' ')
            << "  " << t << std::string(15 - t.size(), ' ') << p << "\n";
    }
    return out.str();
}

std::string render_report_csv(const RankReport& report) {
    std::ostringstream out;
    out << "metric,model";
    for (const auto& t : report.trial_ids) out << ',' << csv_quote(t);
    out << ",average\n";
    auto block = [&](const char* metric, const std::vector<std::vector<double>>& per_trial,
                     const std::vector<double>& avg) {
        for (size_t idx : order_by(avg)) {
            out << metric << ',' << csv_quote(report.models[idx]);
            for (size_t t = 0; t < report.trial_ids.size(); ++t)
                out << ',' << format_score(per_trial[t][idx]);
            out << ',' << format_score(avg[idx]) << "\n";
        }
    };
    block("avg_trial_ranking", report.avg_t_per_trial, report.avg_t);
    block("total_prob_ranking", report.avg_p_per_trial, report.avg_p);
    return out.str();
}

std::string render_exclusions_csv(const std::vector<Exclusion>& exclusions) {
    std::ostringstream out;
    out << "trial,query_cell,reason,models_affected\n";
    for (const Exclusion& e : exclusions) {
        out << csv_quote(e.trial) << ',' << csv_quote(e.query_cell) << ',' << e.reason << ',';
        std::string joined;
        for (size_t i = 0; i < e.models_affected.size(); ++i)
            joined += (i ? ";" : "") + e.models_affected[i];
        out << csv_quote(joined) << "\n";
    }
    return out.str();
}

}  // namespace conjnet
