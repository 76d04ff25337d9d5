#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "conjnet/errors.hpp"
#include "conjnet/pipeline.hpp"
#include "conjnet/synth.hpp"

using namespace conjnet;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// writes a small synthetic trial + run manifest under dir, returns manifest path
std::string make_run_fixture(const std::string& dir, uint64_t seed) {
    fs::create_directories(dir);
    SynthConfig cfg;
    cfg.seed = seed;
    cfg.frames = 40;
    cfg.conj_rate = 0.6;
    cfg.initial_donors = 2;
    cfg.initial_recipients = 6;
    cfg.true_expr_delay = DelayModel::uniform(15, 60, 'R');
    cfg.true_mat_delay = DelayModel::uniform(10, 40, 'M');
    const SynthResult r = generate_trial(cfg, "fixture");
    write_text_file(dir + "/tracks.csv", r.track_csv);
    write_text_file(dir + "/trial.json",
                    "{\"trial_id\":\"fixture\",\"frame_interval_min\":5,"
                    "\"track_file\":\"tracks.csv\"}\n");
    write_text_file(dir + "/grid.json",
                    "[{\"contact_fn\":\"Base\",\"expr_range\":[15,60],\"mat_range\":[10,40]},"
                    "{\"contact_fn\":\"Edge\",\"expr_range\":[15,60],\"mat_range\":[10,40]}]\n");
    write_text_file(dir + "/run.json",
                    "{\"trials\":[\"trial.json\"],\"models\":\"grid.json\","
                    "\"backend\":\"factored\",\"output_dir\":\"" +
                        dir + "/out\",\"parallelism\":1}\n");
    return dir + "/run.json";
}

}  // namespace

TEST_CASE("run writes all artifacts and is deterministic across worker counts") {
    const std::string dir = (fs::temp_directory_path() / "conjnet_run_fixture").string();
    fs::remove_all(dir);
    const std::string manifest_path = make_run_fixture(dir, 321);

    RunManifest m = load_run_manifest(manifest_path);
    m.output_dir = dir + "/out1";
    m.parallelism = 1;
    const RunOutcome o1 = run(m);
    CHECK(o1.exit_code == 0);
    m.output_dir = dir + "/out8";
    m.parallelism = 8;
    const RunOutcome o8 = run(m);
    CHECK(o8.exit_code == 0);

    for (const char* name : {"summary.json", "rank_report.txt", "rank_report.csv",
                             "exclusions.csv"}) {
        CHECK(slurp(dir + "/out1/" + name) == slurp(dir + "/out8/" + name));
    }
    CHECK(fs::exists(dir + "/out1/results_fixture.csv"));

    // re-running with identical inputs reproduces identical summaries
    m.output_dir = dir + "/out1b";
    m.parallelism = 1;
    run(m);
    CHECK(slurp(dir + "/out1/summary.json") == slurp(dir + "/out1b/summary.json"));
}

TEST_CASE("results csv round-trips through the rank loader") {
    const std::string dir = (fs::temp_directory_path() / "conjnet_rank_fixture").string();
    fs::remove_all(dir);
    fs::create_directories(dir);
    SynthConfig cfg;
    cfg.seed = 99;
    cfg.frames = 40;
    cfg.conj_rate = 0.6;
    cfg.true_expr_delay = DelayModel::uniform(15, 60, 'R');
    cfg.true_mat_delay = DelayModel::uniform(10, 40, 'M');
    SynthResult r = generate_trial(cfg, "roundtrip");
    std::vector<ModelConfig> grid{
        ModelConfig::make(ContactFn::Base, 15, 60, 10, 40),
        ModelConfig::make(ContactFn::Edge, 15, 60, 10, 40),
    };
    TrialDataset ds = prepare_trial(std::move(r.dataset), grid);
    const TrialRun tr = run_trial(ds, grid, Backend::Factored, {}, 2);
    REQUIRE(!tr.query_cells.empty());
    const std::string path = dir + "/results.csv";
    write_text_file(path, results_csv(tr));

    ProbTable loaded;
    parse_results_csv(path, loaded);
    REQUIRE(loaded.models.size() == 2);
    REQUIRE(loaded.trials.size() == 1);
    CHECK(loaded.trials[0].query_cells.size() == tr.query_cells.size());
    const ProbTable direct = prob_table({tr}, grid);
    for (size_t m = 0; m < 2; ++m)
        for (size_t q = 0; q < tr.query_cells.size(); ++q) {
            CHECK(loaded.trials[0].status[m][q] == direct.trials[0].status[m][q]);
            if (direct.trials[0].status[m][q] == QueryStatus::Ok)
                CHECK(loaded.trials[0].log_prob[m][q] ==
                      doctest::Approx(direct.trials[0].log_prob[m][q]).epsilon(1e-12));
        }
}

TEST_CASE("empty trials list is a config error") {
    RunManifest m;
    m.trial_manifests = {};
    CHECK_THROWS_AS(run(m), Error);
}

TEST_CASE("default grid has the paper's eight models") {
    const auto grid = default_model_grid();
    REQUIRE(grid.size() == 8);
    bool found = false;
    for (const auto& cfg : grid) found = found || cfg.name == "Base_R(30,150)_M(15,75)";
    CHECK(found);
    for (const auto& cfg : grid) {
        CHECK(cfg.expression_delay.lower >= 5.0);
        CHECK(cfg.maturation_delay.lower >= 5.0);
    }
}
