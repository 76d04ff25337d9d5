// conjnet command line: validate tracking data, build conjugation networks,
// evaluate queries across a model grid, rank models, and generate synthetic
// trials with known ground truth.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "conjnet/errors.hpp"
#include "conjnet/graph.hpp"
#include "conjnet/numeric.hpp"
#include "conjnet/pipeline.hpp"
#include "conjnet/synth.hpp"

namespace fs = std::filesystem;
using namespace conjnet;

namespace {

std::vector<ModelConfig> grid_from_arg(const std::string& arg) {
    if (arg.empty() || arg == "default") return default_model_grid();
    return load_model_grid(arg);
}

int cmd_validate(const std::string& manifest, const std::vector<ModelConfig>& grid) {
    TrialDataset ds = prepare_trial(load_trial_manifest(manifest), grid);
    std::cout << "trial " << ds.trial_id << ": " << ds.cells.size() << " cell observations, "
              << ds.frame_count() << " frames\n";
    int lineages = 0;
    for (const Cell& c : ds.cells)
        if (c.parent == -1) ++lineages;
    std::cout << "  lineage roots: " << lineages << "\n";
    std::cout << "  observed conjugation events: " << observed_event_cells(ds).size() << "\n";
    std::cout << "  plasmid loss events: " << ds.loss_events.size() << "\n";
    for (const LossEvent& e : ds.loss_events)
        std::cout << "    cell " << ds.cells[e.cell].id << " at frame " << e.frame << "\n";
    for (const std::string& w : ds.warnings) std::cout << "  warning: " << w << "\n";
    return 0;
}

int cmd_build(const std::string& manifest, const std::vector<ModelConfig>& grid,
              const std::string& out_dir) {
    TrialDataset ds = prepare_trial(load_trial_manifest(manifest), grid);
    fs::create_directories(out_dir);
    for (const ModelConfig& cfg : grid) {
        const BayesNet net = build_network(ds, cfg);
        std::ostringstream dump;
        dump_graph(net, ds, dump);
        const std::string path = out_dir + "/graph_" + sanitize_filename(ds.trial_id) + "_" +
                                 sanitize_filename(cfg.name) + ".csv";
        write_text_file(path, dump.str());
        std::cout << cfg.name << ": " << net.edge_count(EdgeKind::Lineage) << " lineage, "
                  << net.edge_count(EdgeKind::Conjugation) << " conjugation, "
                  << net.edge_count(EdgeKind::Delay) << " delay edges -> " << path << "\n";
    }
    return 0;
}

int cmd_query(const std::string& manifest, const std::vector<ModelConfig>& grid,
              Backend backend, const QueryBudget& budget, int jobs,
              const std::string& out_dir) {
    TrialDataset ds = prepare_trial(load_trial_manifest(manifest), grid);
    const TrialRun tr = run_trial(ds, grid, backend, budget, jobs);
    fs::create_directories(out_dir);
    const std::string path =
        out_dir + "/results_" + sanitize_filename(tr.trial_id) + ".csv";
    write_text_file(path, results_csv(tr));
    std::cout << "wrote " << path << " (" << tr.query_cells.size() << " queries x "
              << grid.size() << " models)\n";
    return 0;
}

int cmd_rank(const std::vector<std::string>& result_files, const std::string& out_dir) {
    ProbTable table;
    for (const std::string& f : result_files) parse_results_csv(f, table);
    const RankReport report = build_rank_report(table);
    fs::create_directories(out_dir);
    write_text_file(out_dir + "/rank_report.txt", render_report(report));
    write_text_file(out_dir + "/rank_report.csv", render_report_csv(report));
    write_text_file(out_dir + "/exclusions.csv", render_exclusions_csv(report.exclusions));
    std::cout << render_report(report);
    return 0;
}

int cmd_synth(uint64_t seed, const std::string& config_path, const std::string& out_dir) {
    SynthConfig cfg;
    cfg.seed = seed;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw Error(Error::Kind::ConfigError, "cannot open " + config_path);
        nlohmann::json doc;
        in >> doc;
        cfg.arena_w = doc.value("arena_w", cfg.arena_w);
        cfg.arena_h = doc.value("arena_h", cfg.arena_h);
        cfg.initial_donors = doc.value("initial_donors", cfg.initial_donors);
        cfg.initial_recipients = doc.value("initial_recipients", cfg.initial_recipients);
        cfg.division_interval_min = doc.value("division_interval_min", cfg.division_interval_min);
        if (doc.contains("true_contact_fn"))
            cfg.true_contact_fn =
                doc["true_contact_fn"] == "Edge" ? ContactFn::Edge : ContactFn::Base;
        if (doc.contains("true_expr_range"))
            cfg.true_expr_delay = DelayModel::uniform(doc["true_expr_range"][0],
                                                      doc["true_expr_range"][1], 'R');
        if (doc.contains("true_mat_range"))
            cfg.true_mat_delay =
                DelayModel::uniform(doc["true_mat_range"][0], doc["true_mat_range"][1], 'M');
        cfg.conj_rate = doc.value("conj_rate", cfg.conj_rate);
        cfg.contact_range = doc.value("contact_range", cfg.contact_range);
        cfg.frames = doc.value("frames", cfg.frames);
        cfg.frame_interval_min = doc.value("frame_interval_min", cfg.frame_interval_min);
        if (doc.contains("seed")) cfg.seed = doc["seed"].get<uint64_t>();
    }
    const std::string trial_id = "synth" + std::to_string(cfg.seed);
    const SynthResult result = generate_trial(cfg, trial_id);
    fs::create_directories(out_dir);
    write_text_file(out_dir + "/tracks.csv", result.track_csv);
    {
        std::ostringstream gt;
        write_ground_truth(result.truth, gt);
        write_text_file(out_dir + "/ground_truth.events", gt.str());
    }
    nlohmann::ordered_json manifest;
    manifest["trial_id"] = trial_id;
    manifest["frame_interval_min"] = cfg.frame_interval_min;
    manifest["track_file"] = "tracks.csv";
    write_text_file(out_dir + "/trial.json", manifest.dump(2) + "\n");
    std::cout << "wrote " << out_dir << "/tracks.csv (" << result.dataset.cells.size()
              << " observations, " << result.truth.events.size() << " conjugation events)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Noisy-OR conjugation network analysis"};
    app.require_subcommand(1);

    std::string manifest_path, models_arg = "default", out_dir = "out";
    std::string backend_name = "auto";
    int jobs = 1;
    double budget_seconds = 60.0, budget_cost = 8.0 * 1073741824.0;
    uint64_t seed = 1;
    std::vector<std::string> result_files;
    std::string synth_config;

    auto add_common = [&](CLI::App* sub, bool needs_manifest) {
        if (needs_manifest)
            sub->add_option("--manifest", manifest_path, "trial manifest (json)")
                ->required()
                ->envname("CONJNET_MANIFEST");
        sub->add_option("--models", models_arg, "model grid json or 'default'")
            ->envname("CONJNET_MODELS");
        sub->add_option("--out", out_dir, "output directory")->envname("CONJNET_OUT");
    };

    CLI::App* validate = app.add_subcommand("validate", "parse, validate and repair a trial");
    add_common(validate, true);

    CLI::App* build = app.add_subcommand("build", "build and dump networks for a trial");
    add_common(build, true);

    CLI::App* query = app.add_subcommand("query", "evaluate all queries for a trial");
    add_common(query, true);
    query->add_option("--backend", backend_name, "exact|factored|auto")
        ->envname("CONJNET_BACKEND");
    query->add_option("--jobs", jobs, "worker count")->envname("CONJNET_JOBS");
    query->add_option("--budget-seconds", budget_seconds, "per-query time budget")
        ->envname("CONJNET_BUDGET_SECONDS");
    query->add_option("--budget-cost", budget_cost, "per-query cost budget")
        ->envname("CONJNET_BUDGET_COST");

    CLI::App* rank = app.add_subcommand("rank", "rank models from query-result files");
    rank->add_option("--results", result_files, "query-result csv files")->required();
    rank->add_option("--out", out_dir, "output directory")->envname("CONJNET_OUT");

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic trial");
    synth->add_option("--seed", seed, "rng seed")->envname("CONJNET_SEED");
    synth->add_option("--config", synth_config, "synth config json");
    synth->add_option("--out", out_dir, "output directory")->envname("CONJNET_OUT");

    CLI::App* run_cmd = app.add_subcommand("run", "full pipeline over a run manifest");
    run_cmd->add_option("--manifest", manifest_path, "run manifest (json)")
        ->required()
        ->envname("CONJNET_MANIFEST");
    run_cmd->add_option("--backend", backend_name, "exact|factored|auto")
        ->envname("CONJNET_BACKEND");
    run_cmd->add_option("--jobs", jobs, "worker count")->envname("CONJNET_JOBS");
    run_cmd->add_option("--out", out_dir, "output directory override")
        ->envname("CONJNET_OUT");
    run_cmd->add_option("--budget-seconds", budget_seconds, "per-query time budget")
        ->envname("CONJNET_BUDGET_SECONDS");
    run_cmd->add_option("--budget-cost", budget_cost, "per-query cost budget")
        ->envname("CONJNET_BUDGET_COST");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(manifest_path, grid_from_arg(models_arg));
        if (build->parsed())
            return cmd_build(manifest_path, grid_from_arg(models_arg), out_dir);
        if (query->parsed()) {
            QueryBudget budget;
            budget.max_seconds = budget_seconds;
            budget.max_cost = budget_cost;
            return cmd_query(manifest_path, grid_from_arg(models_arg),
                             backend_from_string(backend_name), budget, jobs, out_dir);
        }
        if (rank->parsed()) return cmd_rank(result_files, out_dir);
        if (synth->parsed()) return cmd_synth(seed, synth_config, out_dir);
        if (run_cmd->parsed()) {
            RunManifest m = load_run_manifest(manifest_path);
            if (run_cmd->count("--backend")) m.backend = backend_from_string(backend_name);
            if (run_cmd->count("--jobs")) m.parallelism = jobs;
            if (run_cmd->count("--out")) m.output_dir = out_dir;
            if (run_cmd->count("--budget-seconds")) m.budget.max_seconds = budget_seconds;
            if (run_cmd->count("--budget-cost")) m.budget.max_cost = budget_cost;
            const RunOutcome outcome = run(m);
            for (const std::string& msg : outcome.messages) std::cerr << msg << "\n";
            if (outcome.partial_failure)
                std::cerr << "note: some queries were incalculable within budget\n";
            std::cout << "wrote artifacts to " << m.output_dir << "\n";
            return outcome.exit_code;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind() == Error::Kind::ConfigError ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
