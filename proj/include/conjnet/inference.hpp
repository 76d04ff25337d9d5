#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "conjnet/graph.hpp"

namespace conjnet {

// Frames in which a conjugation event could explain an observed RFP
// threshold crossing, with the per-frame expression-delay mass
// (cdf binned at frame granularity, renormalized over the realizable
// window).
struct WindowPmf {
    std::vector<int> frames;      // ascending
    std::vector<double> pmf;      // aligned, sums to 1 when non-empty
    std::vector<double> log_pmf;  // aligned
    bool empty() const { return frames.empty(); }
};

WindowPmf implied_window(const TrialDataset& dataset, const DelayModel& expression_delay,
                         double threshold_time, int first_possible_frame);

// One conjugation event to explain: the lineage path from its root to the
// first cell above the RFP threshold.
struct Query {
    int32_t cell = -1;
    std::string cell_id;
    double threshold_time = 0.0;
    std::vector<int32_t> path;  // root .. cell
    int root_frame = 0;         // frame of path.front()
    WindowPmf window;           // conjugation window under the model
};

// A non-focal transconjugant's observed threshold event. Kept out of the
// hard assignments: pinning g=1 at any particular frame would presume the
// conjugation time the query marginalizes over. Backends consume it as a
// likelihood over the lineage's first-acquisition frame.
struct SoftThreshold {
    int32_t cell = -1;
    double threshold_time = 0.0;
    std::vector<int32_t> path;  // root .. cell
    int root_frame = 0;
    WindowPmf window;
};

struct Evidence {
    std::vector<std::pair<VarIndex, bool>> hard;  // sorted by var index
    std::vector<int8_t> dense;                    // per var: -1 latent, else 0/1
    std::vector<SoftThreshold> soft;
    // per cell: soft constraints whose lineage (path + subtree) contains it
    std::vector<std::vector<int32_t>> mu_constraints;
    std::vector<std::string> notes;  // dropped constraints etc.

    bool is_hard(VarIndex v) const { return dense[static_cast<size_t>(v)] != -1; }
};

enum class QueryStatus { Ok, Impossible, Incalculable };

const char* to_string(QueryStatus s);

struct QueryResult {
    std::string model;
    int32_t query_cell = -1;
    std::string query_cell_id;
    double threshold_time = 0.0;
    QueryStatus status = QueryStatus::Impossible;
    double log_prob = 0.0;  // natural log; -inf iff Impossible
    double elapsed_ms = 0.0;
    double peak_cost = 0.0;
};

struct QueryBudget {
    double max_seconds = 60.0;
    double max_cost = 8.0 * 1073741824.0;  // cost-model units
    int latent_limit = 22;
};

enum class Backend { Exact, Factored, Auto };

// One query per transconjugant cell that first reaches the RFP threshold.
std::vector<Query> enumerate_queries(const TrialDataset& dataset, const ModelConfig& config);

// Experimental data outside the focal lineage: donor lineages g=m=1, frame-0
// recipients g=0, other transconjugants' thresholds as soft constraints.
// Never touches focal-lineage variables.
Evidence assemble_evidence(const TrialDataset& dataset, const ModelConfig& config,
                           const Query& query);

// Minimal subnetwork that preserves the query value: latent ancestors of the
// focal window vars, hard evidence as boundary, plus the variables of every
// soft constraint d-connected to the query (their lineages share latent
// ancestors), to a fixed point.
BayesNet prune_for_query(const BayesNet& net, const Query& query, const Evidence& evidence);

// Exact enumeration over the latent variables of the (pruned) subgraph:
// P(focal lineage first acquires the gene at t in W | evidence), each t
// weighted by the expression mass at delay threshold_time - t.
QueryResult exact_query(const BayesNet& net, const Evidence& evidence, const Query& query,
                        const QueryBudget& budget = {}, bool prune = true);

// Scalable factored computation: first-acquisition scan over the focal path
// with per-frame Noisy-OR hazards, donor maturity entering through marginal
// estimates (1 for donor lineages, an expression-evidence estimate for
// transconjugant lineages, 0 for recipients that never threshold).
// Exact whenever every potential donor's maturity is fixed by evidence.
QueryResult factored_query(const BayesNet& net, const TrialDataset& dataset,
                           const ModelConfig& config, const Evidence& evidence,
                           const Query& query, const QueryBudget& budget = {});

// Naive maturity likelihood of a potential donor cell at a given frame:
// 1 for donor lineages, E_tau[F_mat(t - tau)] over the lineage's implied
// conjugation window for transconjugants, 0 otherwise.
double donor_maturity(const TrialDataset& dataset, const ModelConfig& config,
                      const Evidence& evidence, int32_t cell, int frame);

// Second normalization: total naive donor maturity over the query's window
// contacts, floored at 1e-9. Dividing by it compensates the advantage of
// models that mature donors early.
double maturity_bias_normalizer(const BayesNet& net, const TrialDataset& dataset,
                                const ModelConfig& config, const Evidence& evidence,
                                const Query& query);

// Backend dispatch (auto = exact when the pruned subgraph fits the latent
// limit) plus the maturity bias correction when the model asks for it.
QueryResult evaluate_query(const BayesNet& net, const TrialDataset& dataset,
                           const ModelConfig& config, const Evidence& evidence,
                           const Query& query, Backend backend,
                           const QueryBudget& budget = {});

}  // namespace conjnet
