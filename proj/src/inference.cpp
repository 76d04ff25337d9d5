#include "conjnet/inference.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>

#include "conjnet/errors.hpp"
#include "conjnet/numeric.hpp"

namespace conjnet {

const char* to_string(QueryStatus s) {
    switch (s) {
        case QueryStatus::Ok: return "ok";
        case QueryStatus::Impossible: return "impossible";
        case QueryStatus::Incalculable: return "incalculable";
    }
    return "?";
}

WindowPmf implied_window(const TrialDataset& dataset, const DelayModel& expression_delay,
                         double threshold_time, int first_possible_frame) {
    WindowPmf w;
    const double dt = dataset.frame_interval_min;
    for (int f = std::max(first_possible_frame, 0); f < dataset.frame_count(); ++f) {
        const double d = threshold_time - dataset.time_of_frame(f);
        if (d < expression_delay.lower - 1e-9) break;  // later frames only get closer
        if (d > expression_delay.upper + 1e-9) continue;
        const double mass = frame_pmf(expression_delay, d, dt);
        if (mass > 0.0) {
            w.frames.push_back(f);
            w.pmf.push_back(mass);
        }
    }
    double sum = 0.0;
    for (double p : w.pmf) sum += p;
    if (sum <= 0.0) return {};
    for (double& p : w.pmf) p /= sum;
    w.log_pmf.reserve(w.pmf.size());
    for (double p : w.pmf) w.log_pmf.push_back(std::log(p));
    return w;
}

std::vector<Query> enumerate_queries(const TrialDataset& dataset, const ModelConfig& config) {
    std::vector<Query> out;
    for (int32_t c : observed_event_cells(dataset)) {
        Query q;
        q.cell = c;
        q.cell_id = dataset.cells[c].id;
        q.threshold_time = dataset.time_of_frame(dataset.cells[c].frame);
        q.path = dataset.path_to_root(c);
        q.root_frame = dataset.cells[q.path.front()].frame;
        q.window = implied_window(dataset, config.expression_delay, q.threshold_time,
                                  q.root_frame);
        out.push_back(std::move(q));
    }
    return out;
}

namespace {

std::vector<int32_t> lineage_members(const TrialDataset& dataset, const SoftThreshold& st) {
    std::vector<int32_t> members = st.path;
    std::vector<int32_t> stack{st.cell};
    while (!stack.empty()) {
        const int32_t cur = stack.back();
        stack.pop_back();
        for (int32_t ch : dataset.cells[cur].children) {
            if (dataset.cells[ch].plasmid_lost) continue;
            members.push_back(ch);
            stack.push_back(ch);
        }
    }
    return members;
}

}  // namespace

Evidence assemble_evidence(const TrialDataset& dataset, const ModelConfig& config,
                           const Query& query) {
    Evidence ev;
    const size_t n_cells = dataset.cells.size();
    ev.dense.assign(n_cells * 2, -1);
    ev.mu_constraints.assign(n_cells, {});

    std::vector<char> focal(n_cells, 0);
    for (int32_t c : query.path) focal[static_cast<size_t>(c)] = 1;

    auto set_hard = [&](VarIndex v, bool b) {
        ev.dense[static_cast<size_t>(v)] = b ? 1 : 0;
        ev.hard.push_back({v, b});
    };
    for (size_t i = 0; i < n_cells; ++i) {
        if (focal[i]) continue;  // no evidence inside the focal lineage
        const int32_t c = static_cast<int32_t>(i);
        if (donor_like(dataset, c)) {
            set_hard(var_of(c, VarKind::Gene), true);
            set_hard(var_of(c, VarKind::Maturation), true);
        } else if (dataset.cells[i].frame == 0 && !dataset.cells[i].rfp) {
            set_hard(var_of(c, VarKind::Gene), false);
        }
    }

    for (int32_t c : observed_event_cells(dataset)) {
        if (c == query.cell) continue;
        SoftThreshold st;
        st.cell = c;
        st.threshold_time = dataset.time_of_frame(dataset.cells[c].frame);
        st.path = dataset.path_to_root(c);
        if (std::find(st.path.begin(), st.path.end(), query.cell) != st.path.end())
            continue;  // descendant of the focal cell: still the focal lineage
        st.root_frame = dataset.cells[st.path.front()].frame;
        // a frame-0 root is pinned g=0, so acquisition starts one frame later
        const int first_frame = st.root_frame == 0 ? 1 : st.root_frame;
        st.window = implied_window(dataset, config.expression_delay, st.threshold_time,
                                   first_frame);
        if (st.window.empty()) {
            ev.notes.push_back("threshold of cell '" + dataset.cells[c].id +
                               "' unexplainable under " + config.name +
                               "; constraint dropped");
            continue;
        }
        ev.soft.push_back(std::move(st));
    }

    for (size_t si = 0; si < ev.soft.size(); ++si) {
        for (int32_t m : lineage_members(dataset, ev.soft[si]))
            ev.mu_constraints[static_cast<size_t>(m)].push_back(static_cast<int32_t>(si));
    }
    return ev;
}

namespace {

// Latent-ancestor closure. Latent vars recurse into their parents; hard
// evidence is kept as a clamped boundary. The only latent parents a hard
// variable can have here are frame-0 maturation vars, which are
// deterministically zero, so stopping at evidence never loses information.
void expand_closure(const BayesNet& net, const Evidence& evidence,
                    std::vector<VarIndex>& stack, std::vector<char>& present) {
    while (!stack.empty()) {
        const VarIndex v = stack.back();
        stack.pop_back();
        if (present[static_cast<size_t>(v)]) continue;
        present[static_cast<size_t>(v)] = 1;
        if (evidence.is_hard(v)) continue;
        for (const ParentEdge& e : net.parents[static_cast<size_t>(v)]) stack.push_back(e.src);
    }
}

// Focal/constraint variables whose value the event likelihood depends on:
// gene vars of the path up to the last window frame.
std::vector<VarIndex> event_vars(const std::vector<int32_t>& path, int root_frame,
                                 const WindowPmf& window) {
    std::vector<VarIndex> vars;
    if (window.empty()) return vars;
    const int last = window.frames.back();
    for (size_t i = 0; i < path.size(); ++i) {
        const int frame = root_frame + static_cast<int>(i);
        if (frame > last) break;
        vars.push_back(var_of(path[i], VarKind::Gene));
    }
    return vars;
}

// Per path position: expression mass if the position's frame is in the
// window, else 0.
std::vector<double> event_pmf_by_pos(const std::vector<VarIndex>& vars, int root_frame,
                                     const WindowPmf& window) {
    std::vector<double> pmf(vars.size(), 0.0);
    for (size_t wi = 0; wi < window.frames.size(); ++wi) {
        const int pos = window.frames[wi] - root_frame;
        if (pos >= 0 && static_cast<size_t>(pos) < pmf.size()) pmf[pos] = window.pmf[wi];
    }
    return pmf;
}

}  // namespace

BayesNet prune_for_query(const BayesNet& net, const Query& query, const Evidence& evidence) {
    if (query.cell < 0 || query.cell >= net.n_cells || query.path.empty())
        throw Error(Error::Kind::UnknownQueryTarget, "query cell not in network");
    for (int32_t c : query.path)
        if (c < 0 || c >= net.n_cells)
            throw Error(Error::Kind::UnknownQueryTarget, "query path cell not in network");

    BayesNet sub;
    sub.n_cells = net.n_cells;
    sub.conj_weights_clamped = net.conj_weights_clamped;
    sub.present.assign(static_cast<size_t>(net.var_count()), 0);
    sub.parents.assign(static_cast<size_t>(net.var_count()), {});
    if (query.window.empty()) return sub;  // nothing can explain the event

    std::vector<char>& present = sub.present;
    std::vector<VarIndex> stack = event_vars(query.path, query.root_frame, query.window);
    expand_closure(net, evidence, stack, present);

    // Per-constraint ancestor closures, computed once; a constraint is
    // d-connected to the query iff its closure shares a latent var with the
    // current one, and triggering it can connect further constraints.
    const size_t n_soft = evidence.soft.size();
    std::vector<std::vector<VarIndex>> soft_closure(n_soft);
    for (size_t si = 0; si < n_soft; ++si) {
        std::vector<char> seen(static_cast<size_t>(net.var_count()), 0);
        std::vector<VarIndex> s =
            event_vars(evidence.soft[si].path, evidence.soft[si].root_frame,
                       evidence.soft[si].window);
        expand_closure(net, evidence, s, seen);
        for (VarIndex v = 0; v < net.var_count(); ++v)
            if (seen[static_cast<size_t>(v)]) soft_closure[si].push_back(v);
    }
    std::vector<char> triggered(n_soft, 0);
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t si = 0; si < n_soft; ++si) {
            if (triggered[si]) continue;
            bool connected = false;
            for (VarIndex v : soft_closure[si]) {
                if (present[static_cast<size_t>(v)] && !evidence.is_hard(v)) {
                    connected = true;
                    break;
                }
            }
            if (!connected) continue;
            triggered[si] = 1;
            changed = true;
            for (VarIndex v : soft_closure[si])
                if (!present[static_cast<size_t>(v)]) present[static_cast<size_t>(v)] = 1;
        }
    }

    for (VarIndex v = 0; v < net.var_count(); ++v) {
        if (!present[static_cast<size_t>(v)] || evidence.is_hard(v)) continue;
        sub.parents[static_cast<size_t>(v)] = net.parents[static_cast<size_t>(v)];
    }
    return sub;
}

namespace {

using Clock = std::chrono::steady_clock;

struct ActiveEvent {
    std::vector<VarIndex> vars;   // path gene vars, root first
    std::vector<double> pmf;      // per position; 0 outside the window
};

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct Enumerator {
    explicit Enumerator(const BayesNet& n) : net(n) {}

    const BayesNet& net;
    std::vector<int8_t> value;
    std::vector<VarIndex> latents;
    std::vector<VarIndex> evidence_factors;
    std::vector<ActiveEvent> constraints;  // soft events
    ActiveEvent focal;
    double numerator = 0.0;
    double denominator = 0.0;
    uint64_t leaves = 0;
    bool aborted = false;
    double max_seconds = 0.0;
    Clock::time_point t0;

    double prob_one(VarIndex v) const {
        double survive = 1.0;
        for (const ParentEdge& e : net.parents[static_cast<size_t>(v)])
            if (value[static_cast<size_t>(e.src)] == 1) survive *= (1.0 - e.weight);
        return 1.0 - survive;
    }

    // First path position assigned 1, or -1.
    static int first_on(const std::vector<VarIndex>& vars, const std::vector<int8_t>& value) {
        for (size_t i = 0; i < vars.size(); ++i)
            if (value[static_cast<size_t>(vars[i])] == 1) return static_cast<int>(i);
        return -1;
    }

    void leaf(double w) {
        if ((++leaves & 0xFFFu) == 0 && ms_since(t0) > max_seconds * 1000.0) {
            aborted = true;
            return;
        }
        for (VarIndex v : evidence_factors) {
            const double p1 = prob_one(v);
            w *= value[static_cast<size_t>(v)] == 1 ? p1 : 1.0 - p1;
            if (w == 0.0) return;
        }
        for (const ActiveEvent& c : constraints) {
            const int pos = first_on(c.vars, value);
            w *= pos < 0 ? 0.0 : c.pmf[static_cast<size_t>(pos)];
            if (w == 0.0) return;
        }
        denominator += w;
        const int pos = first_on(focal.vars, value);
        if (pos >= 0 && focal.pmf[static_cast<size_t>(pos)] > 0.0)
            numerator += w * focal.pmf[static_cast<size_t>(pos)];
    }

    void dfs(size_t i, double w) {
        if (aborted) return;
        if (i == latents.size()) {
            leaf(w);
            return;
        }
        const VarIndex v = latents[i];
        const double p1 = prob_one(v);
        if (p1 < 1.0) {
            value[static_cast<size_t>(v)] = 0;
            dfs(i + 1, w * (1.0 - p1));
        }
        if (p1 > 0.0) {
            value[static_cast<size_t>(v)] = 1;
            dfs(i + 1, w * p1);
        }
        value[static_cast<size_t>(v)] = -1;
    }
};

}  // namespace

QueryResult exact_query(const BayesNet& net, const Evidence& evidence, const Query& query,
                        const QueryBudget& budget, bool prune) {
    const auto t0 = Clock::now();
    QueryResult res;
    res.query_cell = query.cell;
    res.query_cell_id = query.cell_id;
    res.threshold_time = query.threshold_time;

    if (query.window.empty()) {
        res.status = QueryStatus::Impossible;
        res.log_prob = kNegInf;
        res.elapsed_ms = ms_since(t0);
        return res;
    }

    BayesNet pruned_store;
    const BayesNet* work = &net;
    if (prune) {
        pruned_store = prune_for_query(net, query, evidence);
        work = &pruned_store;
    }

    std::vector<VarIndex> latents;
    for (VarIndex v : assert_acyclic(*work))
        if (!evidence.is_hard(v)) latents.push_back(v);
    if (static_cast<int>(latents.size()) > budget.latent_limit) {
        res.status = QueryStatus::Incalculable;
        res.peak_cost = std::ldexp(1.0, static_cast<int>(std::min<size_t>(latents.size(), 1000)));
        res.elapsed_ms = ms_since(t0);
        return res;
    }

    Enumerator en{*work};
    en.value = evidence.dense;
    en.latents = std::move(latents);
    en.max_seconds = budget.max_seconds;
    en.t0 = t0;

    // evidence vars that kept a latent parent (only in unpruned networks)
    for (VarIndex v = 0; v < work->var_count(); ++v) {
        if (!work->is_present(v) || !evidence.is_hard(v)) continue;
        for (const ParentEdge& e : work->parents[static_cast<size_t>(v)]) {
            if (!evidence.is_hard(e.src)) {
                en.evidence_factors.push_back(v);
                break;
            }
        }
    }

    en.focal.vars = event_vars(query.path, query.root_frame, query.window);
    en.focal.pmf = event_pmf_by_pos(en.focal.vars, query.root_frame, query.window);
    for (const SoftThreshold& st : evidence.soft) {
        ActiveEvent ev;
        ev.vars = event_vars(st.path, st.root_frame, st.window);
        bool all_present = !ev.vars.empty();
        bool any_latent = false;
        for (VarIndex v : ev.vars) {
            all_present = all_present && work->is_present(v);
            any_latent = any_latent || !evidence.is_hard(v);
        }
        if (!all_present || !any_latent) continue;
        ev.pmf = event_pmf_by_pos(ev.vars, st.root_frame, st.window);
        en.constraints.push_back(std::move(ev));
    }

    const double cost =
        std::ldexp(static_cast<double>(en.latents.size() + en.constraints.size() + 4),
                   static_cast<int>(en.latents.size()));
    res.peak_cost = cost;
    if (cost > budget.max_cost) {
        res.status = QueryStatus::Incalculable;
        res.elapsed_ms = ms_since(t0);
        return res;
    }

    en.dfs(0, 1.0);
    res.elapsed_ms = ms_since(t0);
    if (en.aborted) {
        res.status = QueryStatus::Incalculable;
        return res;
    }
    // denominator 0 means the model contradicts the evidence outright
    const double p = en.denominator > 0.0 ? en.numerator / en.denominator : 0.0;
    if (p <= 0.0) {
        res.status = QueryStatus::Impossible;
        res.log_prob = kNegInf;
    } else {
        res.status = QueryStatus::Ok;
        res.log_prob = std::log(p);
    }
    return res;
}

double donor_maturity(const TrialDataset& dataset, const ModelConfig& config,
                      const Evidence& evidence, int32_t cell, int frame) {
    if (donor_like(dataset, cell)) return 1.0;
    const auto& constraints = evidence.mu_constraints[static_cast<size_t>(cell)];
    if (constraints.empty()) return 0.0;
    const double t = dataset.time_of_frame(frame);
    double best = 0.0;
    for (int32_t si : constraints) {
        const WindowPmf& w = evidence.soft[static_cast<size_t>(si)].window;
        if (w.empty()) continue;
        double acc = 0.0;
        for (int f : w.frames) {
            const double d = t - dataset.time_of_frame(f);
            if (d > 0.0) acc += config.maturation_delay.cdf(d);
        }
        best = std::max(best, acc / static_cast<double>(w.frames.size()));
    }
    return best;
}

QueryResult factored_query(const BayesNet& net, const TrialDataset& dataset,
                           const ModelConfig& config, const Evidence& evidence,
                           const Query& query, const QueryBudget& budget) {
    const auto t0 = Clock::now();
    QueryResult res;
    res.query_cell = query.cell;
    res.query_cell_id = query.cell_id;
    res.threshold_time = query.threshold_time;

    if (query.window.empty()) {
        res.status = QueryStatus::Impossible;
        res.log_prob = kNegInf;
        res.elapsed_ms = ms_since(t0);
        return res;
    }

    const int last_frame = query.window.frames.back();
    double cum_log_surv = 0.0;  // log P(no acquisition before the current frame)
    double total = kNegInf;
    size_t window_idx = 0;
    size_t edges_scanned = 0;
    for (int frame = query.root_frame; frame <= last_frame; ++frame) {
        const int32_t cell = query.path[static_cast<size_t>(frame - query.root_frame)];
        double log_surv = 0.0;
        for (const ParentEdge& e : net.parents[static_cast<size_t>(var_of(cell, VarKind::Gene))]) {
            if (e.kind != EdgeKind::Conjugation) continue;
            ++edges_scanned;
            const double mu = donor_maturity(dataset, config, evidence, cell_of(e.src), frame);
            if (mu > 0.0) log_surv += std::log1p(-e.weight * mu);
        }
        if (window_idx < query.window.frames.size() &&
            query.window.frames[window_idx] == frame) {
            const double term =
                cum_log_surv + log1mexp(log_surv) + query.window.log_pmf[window_idx];
            total = logaddexp(total, term);
            ++window_idx;
        }
        cum_log_surv += log_surv;
    }

    res.peak_cost = static_cast<double>(edges_scanned + query.path.size());
    res.elapsed_ms = ms_since(t0);
    if (res.elapsed_ms > budget.max_seconds * 1000.0 || res.peak_cost > budget.max_cost) {
        res.status = QueryStatus::Incalculable;
        return res;
    }
    if (total == kNegInf) {
        res.status = QueryStatus::Impossible;
        res.log_prob = kNegInf;
    } else {
        res.status = QueryStatus::Ok;
        res.log_prob = total;
    }
    return res;
}

double maturity_bias_normalizer(const BayesNet& net, const TrialDataset& dataset,
                                const ModelConfig& config, const Evidence& evidence,
                                const Query& query) {
    double sum = 0.0;
    for (int frame : query.window.frames) {
        const int32_t cell = query.path[static_cast<size_t>(frame - query.root_frame)];
        for (const ParentEdge& e : net.parents[static_cast<size_t>(var_of(cell, VarKind::Gene))]) {
            if (e.kind != EdgeKind::Conjugation) continue;
            sum += donor_maturity(dataset, config, evidence, cell_of(e.src), frame);
        }
    }
    return std::max(sum, 1e-9);
}

QueryResult evaluate_query(const BayesNet& net, const TrialDataset& dataset,
                           const ModelConfig& config, const Evidence& evidence,
                           const Query& query, Backend backend, const QueryBudget& budget) {
    const auto t0 = Clock::now();
    QueryResult res;
    switch (backend) {
        case Backend::Exact:
            res = exact_query(net, evidence, query, budget, true);
            break;
        case Backend::Factored:
            res = factored_query(net, dataset, config, evidence, query, budget);
            break;
        case Backend::Auto: {
            if (query.window.empty()) {
                res = factored_query(net, dataset, config, evidence, query, budget);
                break;
            }
            BayesNet pruned = prune_for_query(net, query, evidence);
            int latent = 0;
            for (VarIndex v = 0; v < pruned.var_count(); ++v)
                if (pruned.is_present(v) && !evidence.is_hard(v)) ++latent;
            if (latent <= budget.latent_limit)
                res = exact_query(pruned, evidence, query, budget, false);
            else
                res = factored_query(net, dataset, config, evidence, query, budget);
            break;
        }
    }
    if (config.maturity_bias_correction && res.status == QueryStatus::Ok)
        res.log_prob -= std::log(maturity_bias_normalizer(net, dataset, config, evidence, query));
    res.model = config.name;
    res.elapsed_ms = ms_since(t0);
    return res;
}

}  // namespace conjnet
