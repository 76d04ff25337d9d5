#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "conjnet/data_ingest.hpp"
#include "conjnet/model_config.hpp"

namespace conjnet {

// Each cell carries two binary variables: has-the-plasmid (gene) and can-
// donate (maturation). RFP variables stay implicit; the query evaluator
// handles expression directly.
enum class VarKind : uint8_t { Gene = 0, Maturation = 1 };

using VarIndex = int32_t;

inline VarIndex var_of(int32_t cell, VarKind kind) {
    return cell * 2 + static_cast<int32_t>(kind);
}
inline int32_t cell_of(VarIndex v) { return v / 2; }
inline VarKind kind_of(VarIndex v) {
    return static_cast<VarKind>(v & 1);
}

enum class EdgeKind : uint8_t { Lineage, Conjugation, Delay };

struct ParentEdge {
    VarIndex src = -1;
    double weight = 0.0;  // in (0, 1]; zero-weight edges are never stored
    EdgeKind kind = EdgeKind::Lineage;
};

// Parent-major Noisy-OR network over the 2*n_cells variables of one trial.
// Immutable once built; safe to share across threads.
struct BayesNet {
    int32_t n_cells = 0;
    std::vector<std::vector<ParentEdge>> parents;  // by VarIndex
    // Pruning mask; full networks have every var present.
    std::vector<char> present;
    bool conj_weights_clamped = false;

    VarIndex var_count() const { return n_cells * 2; }
    bool is_present(VarIndex v) const { return present[static_cast<size_t>(v)] != 0; }
    size_t edge_count(EdgeKind kind) const;
    size_t edge_count() const;
};

// Build the network for one (trial, model) pair:
//   - lineage edges g->g and m->m, weight 1, except into plasmid-lost cells;
//   - conjugation edges m(src)->g(dst) for contact candidates within the
//     model's contact range, into cells that are not expressing RFP and not
//     donor lineages, weights normalized over all such edges;
//   - delay edges g(cell)->m(descendant) for time offsets inside the
//     maturation delay support, weighted by the CDF recurrence.
// Requires detect_contact_candidates to have run with a radius covering
// config.contact_range.
BayesNet build_network(const TrialDataset& dataset, const ModelConfig& config);

// Topological order over present vars. Throws CyclicGraph with a witness
// cycle in the message; impossible for built networks by construction.
std::vector<VarIndex> assert_acyclic(const BayesNet& net);

// Debug/golden dump, one edge per line:
// src_cell,src_kind,dst_cell,dst_kind,kind,weight
void dump_graph(const BayesNet& net, const TrialDataset& dataset, std::ostream& out);

// First-threshold transconjugant cells; one observed conjugation event each.
std::vector<int32_t> observed_event_cells(const TrialDataset& dataset);

}  // namespace conjnet
