#include "conjnet/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "conjnet/csv.hpp"
#include "conjnet/errors.hpp"
#include "conjnet/numeric.hpp"

namespace fs = std::filesystem;

namespace conjnet {

Backend backend_from_string(const std::string& name) {
    if (name == "exact") return Backend::Exact;
    if (name == "factored") return Backend::Factored;
    if (name == "auto") return Backend::Auto;
    throw Error(Error::Kind::ConfigError, "unknown backend: " + name);
}

RunManifest load_run_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Error::Kind::ConfigError, "cannot open run manifest: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Error::Kind::ConfigError, "bad run manifest: " + std::string(e.what()));
    }
    RunManifest m;
    if (!doc.contains("trials") || !doc["trials"].is_array() || doc["trials"].empty())
        throw Error(Error::Kind::ConfigError, "run manifest needs a non-empty trials list");
    const std::string base = fs::path(path).parent_path().string();
    for (const auto& t : doc["trials"]) {
        std::string p = t.get<std::string>();
        if (!p.empty() && p[0] != '/' && !base.empty()) p = base + "/" + p;
        m.trial_manifests.push_back(p);
    }
    m.model_grid_path = doc.value("models", std::string{});
    if (!m.model_grid_path.empty() && m.model_grid_path != "default" &&
        m.model_grid_path[0] != '/' && !base.empty())
        m.model_grid_path = base + "/" + m.model_grid_path;
    m.backend = backend_from_string(doc.value("backend", std::string("auto")));
    m.output_dir = doc.value("output_dir", std::string("out"));
    m.parallelism = doc.value("parallelism", 1);
    m.budget.max_seconds = doc.value("budget_seconds", m.budget.max_seconds);
    m.budget.max_cost = doc.value("budget_cost", m.budget.max_cost);
    return m;
}

TrialDataset prepare_trial(TrialDataset dataset, const std::vector<ModelConfig>& grid) {
    double expr_lo = 1e300, expr_hi = 0.0, max_range = 0.0;
    for (const ModelConfig& cfg : grid) {
        expr_lo = std::min(expr_lo, cfg.expression_delay.lower);
        expr_hi = std::max(expr_hi, cfg.expression_delay.upper);
        max_range = std::max(max_range, cfg.contact_range);
    }
    dataset = propagate_labels(std::move(dataset));
    dataset = repair_plasmid_loss(std::move(dataset), expr_lo, expr_hi);
    dataset = detect_contact_candidates(std::move(dataset), max_range);
    return dataset;
}

TrialRun run_trial(const TrialDataset& dataset, const std::vector<ModelConfig>& grid,
                   Backend backend, const QueryBudget& budget, int jobs) {
    TrialRun run;
    run.trial_id = dataset.trial_id;
    for (int32_t c : observed_event_cells(dataset)) {
        run.query_cells.push_back(dataset.cells[c].id);
        run.threshold_times.push_back(dataset.time_of_frame(dataset.cells[c].frame));
    }

    std::vector<BayesNet> nets;
    std::vector<std::vector<Query>> queries;
    nets.reserve(grid.size());
    for (const ModelConfig& cfg : grid) {
        nets.push_back(build_network(dataset, cfg));
        queries.push_back(enumerate_queries(dataset, cfg));
    }

    const size_t n_queries = run.query_cells.size();
    run.results.assign(grid.size(), std::vector<QueryResult>(n_queries));

    struct Task {
        size_t model, query;
    };
    std::vector<Task> tasks;
    for (size_t m = 0; m < grid.size(); ++m)
        for (size_t q = 0; q < n_queries; ++q) tasks.push_back({m, q});

    std::atomic<size_t> next{0};
    std::atomic<bool> failed{false};
    std::string failure;
    std::mutex failure_mutex;
    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= tasks.size() || failed.load()) return;
            const Task task = tasks[i];
            try {
                const Query& query = queries[task.model][task.query];
                const Evidence evidence =
                    assemble_evidence(dataset, grid[task.model], query);
                run.results[task.model][task.query] =
                    evaluate_query(nets[task.model], dataset, grid[task.model], evidence,
                                   query, backend, budget);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failed.exchange(true)) failure = e.what();
            }
        }
    };
    const int n_workers = std::max(1, jobs);
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failed.load()) throw Error(Error::Kind::DataError, "query evaluation failed: " + failure);
    return run;
}

ProbTable prob_table(const std::vector<TrialRun>& runs, const std::vector<ModelConfig>& grid) {
    ProbTable table;
    for (const ModelConfig& cfg : grid) table.models.push_back(cfg.name);
    for (const TrialRun& run : runs) {
        TrialResults tr;
        tr.trial_id = run.trial_id;
        tr.query_cells = run.query_cells;
        tr.status.resize(grid.size());
        tr.log_prob.resize(grid.size());
        for (size_t m = 0; m < grid.size(); ++m) {
            for (const QueryResult& r : run.results[m]) {
                tr.status[m].push_back(r.status);
                tr.log_prob[m].push_back(r.status == QueryStatus::Ok ? r.log_prob : kNegInf);
            }
        }
        table.trials.push_back(std::move(tr));
    }
    return table;
}

std::string results_csv(const TrialRun& run) {
    std::ostringstream out;
    out << "trial_id,model,query_cell,threshold_min,status,log_prob,elapsed_ms\n";
    for (size_t m = 0; m < run.results.size(); ++m) {
        for (const QueryResult& r : run.results[m]) {
            out << csv_quote(run.trial_id) << ',' << csv_quote(r.model) << ','
                << csv_quote(r.query_cell_id) << ',' << fmt_double(r.threshold_time) << ','
                << to_string(r.status) << ','
                << fmt_double(r.status == QueryStatus::Ok ? r.log_prob : kNegInf) << ','
                << fmt_double(r.elapsed_ms) << "\n";
        }
    }
    return out.str();
}

void parse_results_csv(const std::string& path, ProbTable& into) {
    std::ifstream in(path);
    if (!in) throw Error(Error::Kind::DataError, "cannot open results file: " + path);
    std::string line;
    if (!std::getline(in, line) ||
        line.rfind("trial_id,model,query_cell,threshold_min,status,log_prob", 0) != 0)
        throw Error(Error::Kind::DataError, "bad results header in " + path);

    auto model_index = [&](const std::string& name) -> size_t {
        for (size_t i = 0; i < into.models.size(); ++i)
            if (into.models[i] == name) return i;
        into.models.push_back(name);
        for (TrialResults& t : into.trials) {
            t.status.emplace_back(t.query_cells.size(), QueryStatus::Impossible);
            t.log_prob.emplace_back(t.query_cells.size(), kNegInf);
        }
        return into.models.size() - 1;
    };
    auto trial_index = [&](const std::string& id) -> size_t {
        for (size_t i = 0; i < into.trials.size(); ++i)
            if (into.trials[i].trial_id == id) return i;
        TrialResults t;
        t.trial_id = id;
        t.status.assign(into.models.size(), {});
        t.log_prob.assign(into.models.size(), {});
        into.trials.push_back(std::move(t));
        return into.trials.size() - 1;
    };

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> f = csv_split(line);
        if (f.size() < 7) throw Error(Error::Kind::DataError, "bad results row: " + line);
        const size_t t = trial_index(f[0]);
        const size_t m = model_index(f[1]);
        TrialResults& trial = into.trials[t];
        size_t q = 0;
        for (; q < trial.query_cells.size(); ++q)
            if (trial.query_cells[q] == f[2]) break;
        if (q == trial.query_cells.size()) {
            trial.query_cells.push_back(f[2]);
            for (size_t mm = 0; mm < into.models.size(); ++mm) {
                trial.status[mm].push_back(QueryStatus::Impossible);
                trial.log_prob[mm].push_back(kNegInf);
            }
        }
        QueryStatus status;
        if (f[4] == "ok")
            status = QueryStatus::Ok;
        else if (f[4] == "impossible")
            status = QueryStatus::Impossible;
        else if (f[4] == "incalculable")
            status = QueryStatus::Incalculable;
        else
            throw Error(Error::Kind::DataError, "bad status: " + f[4]);
        trial.status[m][q] = status;
        trial.log_prob[m][q] =
            status == QueryStatus::Ok ? std::strtod(f[5].c_str(), nullptr) : kNegInf;
    }
}

std::string sanitize_filename(const std::string& name) {
    std::string out;
    for (char c : name) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')
            out.push_back(c);
        else
            out.push_back('-');
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Error::Kind::DataError, "cannot write " + path);
    out << content;
}

RunOutcome run(const RunManifest& manifest) {
    RunOutcome outcome;
    if (manifest.trial_manifests.empty())
        throw Error(Error::Kind::ConfigError, "run manifest has no trials");

    const std::vector<ModelConfig> grid =
        manifest.model_grid_path.empty() || manifest.model_grid_path == "default"
            ? default_model_grid()
            : load_model_grid(manifest.model_grid_path);

    fs::create_directories(manifest.output_dir);

    std::vector<TrialRun> runs;
    for (const std::string& path : manifest.trial_manifests) {
        TrialDataset dataset = prepare_trial(load_trial_manifest(path), grid);
        TrialRun tr = run_trial(dataset, grid, manifest.backend, manifest.budget,
                                manifest.parallelism);
        for (const auto& per_model : tr.results)
            for (const QueryResult& r : per_model)
                if (r.status == QueryStatus::Incalculable) outcome.partial_failure = true;
        write_text_file(manifest.output_dir + "/results_" + sanitize_filename(tr.trial_id) +
                            ".csv",
                        results_csv(tr));
        for (const std::string& w : dataset.warnings)
            outcome.messages.push_back(dataset.trial_id + ": " + w);
        runs.push_back(std::move(tr));
    }

    const ProbTable table = prob_table(runs, grid);
    const RankReport report = build_rank_report(table);
    write_text_file(manifest.output_dir + "/rank_report.txt", render_report(report));
    write_text_file(manifest.output_dir + "/rank_report.csv", render_report_csv(report));
    write_text_file(manifest.output_dir + "/exclusions.csv",
                    render_exclusions_csv(report.exclusions));

    nlohmann::ordered_json summary;
    summary["models"] = [&] {
        nlohmann::ordered_json a = nlohmann::ordered_json::array();
        for (const auto& m : table.models) a.push_back(m);
        return a;
    }();
    nlohmann::ordered_json trials = nlohmann::ordered_json::array();
    for (const TrialRun& tr : runs) {
        nlohmann::ordered_json jt;
        jt["trial_id"] = tr.trial_id;
        jt["query_cells"] = tr.query_cells;
        nlohmann::ordered_json results;
        for (size_t m = 0; m < table.models.size(); ++m) {
            nlohmann::ordered_json col = nlohmann::ordered_json::array();
            for (const QueryResult& r : tr.results[m]) {
                nlohmann::ordered_json cell;
                cell["status"] = to_string(r.status);
                cell["log_prob"] =
                    fmt_double(r.status == QueryStatus::Ok ? r.log_prob : kNegInf);
                col.push_back(cell);
            }
            results[table.models[m]] = col;
        }
        jt["results"] = results;
        trials.push_back(jt);
    }
    summary["trials"] = trials;
    auto scores = [&](const std::vector<double>& xs) {
        nlohmann::ordered_json o;
        for (size_t m = 0; m < report.models.size(); ++m)
            o[report.models[m]] = fmt_double(xs[m]);
        return o;
    };
    summary["avg_trial_ranking"] = scores(report.avg_t);
    summary["total_prob_ranking"] = scores(report.avg_p);
    nlohmann::ordered_json excl = nlohmann::ordered_json::array();
    for (const Exclusion& e : report.exclusions) {
        nlohmann::ordered_json je;
        je["trial"] = e.trial;
        je["query_cell"] = e.query_cell;
        je["reason"] = e.reason;
        je["models_affected"] = e.models_affected;
        excl.push_back(je);
    }
    summary["exclusions"] = excl;
    write_text_file(manifest.output_dir + "/summary.json", summary.dump(2) + "\n");

    outcome.exit_code = 0;
    return outcome;
}

}  // namespace conjnet
