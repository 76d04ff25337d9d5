#pragma once

#include <string>
#include <vector>

#include "conjnet/inference.hpp"
#include "conjnet/ranking.hpp"

namespace conjnet {

struct RunManifest {
    std::vector<std::string> trial_manifests;
    std::string model_grid_path;  // empty or "default" = built-in 8-model grid
    Backend backend = Backend::Auto;
    std::string output_dir = "out";
    int parallelism = 1;
    QueryBudget budget;
};

RunManifest load_run_manifest(const std::string& path);

Backend backend_from_string(const std::string& name);

// Prepared trial: parsed, labels propagated, plasmid loss repaired with the
// grid's maximal expression window, contact candidates covering the grid's
// largest contact range.
TrialDataset prepare_trial(TrialDataset dataset, const std::vector<ModelConfig>& grid);

// All query evaluations for one trial across the grid. Tasks are distributed
// over `jobs` workers; results land in slots keyed by (model, query), so the
// outcome does not depend on scheduling.
struct TrialRun {
    std::string trial_id;
    std::vector<std::string> query_cells;
    std::vector<double> threshold_times;
    std::vector<std::vector<QueryResult>> results;  // [model][query]
};

TrialRun run_trial(const TrialDataset& dataset, const std::vector<ModelConfig>& grid,
                   Backend backend, const QueryBudget& budget, int jobs);

ProbTable prob_table(const std::vector<TrialRun>& runs,
                     const std::vector<ModelConfig>& grid);

// Per-trial query-result file:
// trial_id,model,query_cell,threshold_min,status,log_prob,elapsed_ms
std::string results_csv(const TrialRun& run);
void parse_results_csv(const std::string& path, ProbTable& into);

struct RunOutcome {
    int exit_code = 0;
    bool partial_failure = false;  // some queries incalculable
    std::vector<std::string> messages;
};

// Full pipeline: validate + repair every trial, evaluate the grid, rank,
// and write per-trial result files, rank report (text + csv), exclusion log
// and a machine-readable summary.json into the output directory. Identical
// inputs produce identical summary artifacts regardless of `parallelism`
// (timings live only in the per-query result files).
RunOutcome run(const RunManifest& manifest);

std::string sanitize_filename(const std::string& name);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace conjnet
