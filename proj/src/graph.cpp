#include "conjnet/graph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <string>

#include "conjnet/cpd.hpp"
#include "conjnet/errors.hpp"
#include "conjnet/numeric.hpp"

namespace conjnet {

size_t BayesNet::edge_count(EdgeKind kind) const {
    size_t n = 0;
    for (const auto& ps : parents)
        for (const ParentEdge& e : ps)
            if (e.kind == kind) ++n;
    return n;
}

size_t BayesNet::edge_count() const {
    size_t n = 0;
    for (const auto& ps : parents) n += ps.size();
    return n;
}

std::vector<int32_t> observed_event_cells(const TrialDataset& dataset) {
    std::vector<int32_t> out;
    for (int32_t c : first_threshold_cells(dataset)) {
        if (dataset.cells[c].label != CellType::Transconjugant) continue;
        if (donor_like(dataset, c)) continue;
        out.push_back(c);
    }
    return out;
}

BayesNet build_network(const TrialDataset& dataset, const ModelConfig& config) {
    if (dataset.cells.empty()) throw Error(Error::Kind::EmptyTrial, "trial has no cells");

    BayesNet net;
    net.n_cells = static_cast<int32_t>(dataset.cells.size());
    net.parents.assign(static_cast<size_t>(net.var_count()), {});
    net.present.assign(static_cast<size_t>(net.var_count()), 1);

    // type (i): properties pass to direct descendants with certainty
    for (int32_t c = 0; c < net.n_cells; ++c) {
        const Cell& cell = dataset.cells[c];
        if (cell.parent == -1 || cell.plasmid_lost) continue;
        net.parents[var_of(c, VarKind::Gene)].push_back(
            {var_of(cell.parent, VarKind::Gene), 1.0, EdgeKind::Lineage});
        net.parents[var_of(c, VarKind::Maturation)].push_back(
            {var_of(cell.parent, VarKind::Maturation), 1.0, EdgeKind::Lineage});
    }

    // type (ii): potential conjugation across contacts, into cells that could
    // still be recipients; trivial edges (target already expressing) omitted
    struct RawEdge {
        int32_t src, dst;
        double raw;
    };
    std::vector<RawEdge> raw_edges;
    auto consider = [&](int32_t src, int32_t dst) {
        const Cell& target = dataset.cells[dst];
        if (target.rfp || donor_like(dataset, dst)) return;
        const double raw = contact_raw_weight(dataset.cells[src].box, target.box,
                                              config.contact_fn, config.contact_range) *
                           config.raw_weight_scale;
        if (raw > 0.0) raw_edges.push_back({src, dst, raw});
    };
    for (const auto& frame_pairs : dataset.contact_candidates) {
        for (const ContactPair& pair : frame_pairs) {
            if (pair.distance > config.contact_range) continue;
            consider(pair.a, pair.b);
            consider(pair.b, pair.a);
        }
    }
    if (!raw_edges.empty()) {
        const int events = static_cast<int>(observed_event_cells(dataset).size());
        const double budget =
            config.normalization_budget.value_or(static_cast<double>(std::max(events, 1)));
        std::vector<double> raws;
        raws.reserve(raw_edges.size());
        for (const RawEdge& e : raw_edges) raws.push_back(e.raw);
        const NormalizedWeights normalized = normalize_conjugation(raws, budget);
        net.conj_weights_clamped = normalized.clamped;
        for (size_t i = 0; i < raw_edges.size(); ++i) {
            net.parents[var_of(raw_edges[i].dst, VarKind::Gene)].push_back(
                {var_of(raw_edges[i].src, VarKind::Maturation), normalized.weights[i],
                 EdgeKind::Conjugation});
        }
    }

    // type (iii): gene -> maturation of descendants inside the delay support
    const BoundDelay mat = bind_delay(config.maturation_delay, dataset.frame_interval_min);
    if (!mat.times.empty()) {
        const int max_offset =
            static_cast<int>(std::lround(mat.times.back() / dataset.frame_interval_min));
        std::vector<double> alpha_by_offset(static_cast<size_t>(max_offset) + 1, 0.0);
        for (size_t k = 0; k < mat.times.size(); ++k) {
            const int off = static_cast<int>(std::lround(mat.times[k] / dataset.frame_interval_min));
            alpha_by_offset[static_cast<size_t>(off)] = mat.alphas[k];
        }
        std::vector<std::pair<int32_t, int>> stack;  // (cell, offset)
        for (int32_t c = 0; c < net.n_cells; ++c) {
            stack.clear();
            stack.push_back({c, 0});
            while (!stack.empty()) {
                auto [cur, off] = stack.back();
                stack.pop_back();
                if (off > 0 && alpha_by_offset[static_cast<size_t>(off)] > 0.0) {
                    net.parents[var_of(cur, VarKind::Maturation)].push_back(
                        {var_of(c, VarKind::Gene), alpha_by_offset[static_cast<size_t>(off)],
                         EdgeKind::Delay});
                }
                if (off == max_offset) continue;
                for (int32_t ch : dataset.cells[cur].children)
                    if (!dataset.cells[ch].plasmid_lost) stack.push_back({ch, off + 1});
            }
        }
    }

    // canonical parent order, so iteration (and float accumulation) is stable
    for (auto& ps : net.parents) {
        std::sort(ps.begin(), ps.end(), [](const ParentEdge& a, const ParentEdge& b) {
            return std::tie(a.kind, a.src) < std::tie(b.kind, b.src);
        });
    }

    assert_acyclic(net);
    return net;
}

std::vector<VarIndex> assert_acyclic(const BayesNet& net) {
    const size_t n = static_cast<size_t>(net.var_count());
    std::vector<int32_t> out_degree_pending(n, 0);  // unprocessed parents per var
    std::vector<std::vector<VarIndex>> children(n);
    for (size_t v = 0; v < n; ++v) {
        if (!net.present[v]) continue;
        for (const ParentEdge& e : net.parents[v]) {
            children[static_cast<size_t>(e.src)].push_back(static_cast<VarIndex>(v));
            ++out_degree_pending[v];
        }
    }
    std::vector<VarIndex> order;
    order.reserve(n);
    std::vector<VarIndex> ready;
    for (size_t v = 0; v < n; ++v)
        if (net.present[v] && out_degree_pending[v] == 0) ready.push_back(static_cast<VarIndex>(v));
    size_t head = 0;
    while (head < ready.size()) {
        const VarIndex v = ready[head++];
        order.push_back(v);
        for (VarIndex ch : children[static_cast<size_t>(v)])
            if (--out_degree_pending[ch] == 0) ready.push_back(ch);
    }
    size_t present_count = 0;
    for (size_t v = 0; v < n; ++v) present_count += net.present[v] ? 1 : 0;
    if (order.size() == present_count) return order;

    // find a witness cycle among the leftover vars
    std::vector<int> state(n, 0);
    std::vector<VarIndex> path;
    std::string witness;
    std::function<bool(VarIndex)> dfs = [&](VarIndex v) -> bool {
        state[v] = 1;
        path.push_back(v);
        for (const ParentEdge& e : net.parents[v]) {
            if (state[e.src] == 1) {
                witness = std::to_string(e.src);
                for (auto it = std::find(path.begin(), path.end(), e.src); it != path.end();
                     ++it)
                    witness += " <- " + std::to_string(*it);
                return true;
            }
            if (state[e.src] == 0 && dfs(e.src)) return true;
        }
        state[v] = 2;
        path.pop_back();
        return false;
    };
    for (size_t v = 0; v < n; ++v)
        if (net.present[v] && out_degree_pending[v] > 0 && state[v] == 0 && dfs(static_cast<VarIndex>(v)))
            break;
    throw Error(Error::Kind::CyclicGraph, "cycle detected: " + witness);
}

void dump_graph(const BayesNet& net, const TrialDataset& dataset, std::ostream& out) {
    auto kind_name = [](EdgeKind k) {
        switch (k) {
            case EdgeKind::Lineage: return "lineage";
            case EdgeKind::Conjugation: return "conjugation";
            case EdgeKind::Delay: return "delay";
        }
        return "?";
    };
    for (VarIndex v = 0; v < net.var_count(); ++v) {
        if (!net.is_present(v)) continue;
        for (const ParentEdge& e : net.parents[static_cast<size_t>(v)]) {
            out << dataset.cells[cell_of(e.src)].id << ','
                << (kind_of(e.src) == VarKind::Gene ? 'g' : 'm') << ','
                << dataset.cells[cell_of(v)].id << ','
                << (kind_of(v) == VarKind::Gene ? 'g' : 'm') << ',' << kind_name(e.kind)
                << ',' << fmt_double(e.weight) << "\n";
        }
    }
}

}  // namespace conjnet
