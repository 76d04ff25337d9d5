#include <doctest.h>

#include <set>
#include <sstream>

#include "conjnet/errors.hpp"
#include "conjnet/graph.hpp"

using namespace conjnet;

namespace {

const char* kHeader = "frame,cell_id,parent_id,type,rfp_flag,x,y,half_len,half_wid,angle\n";

TrialDataset prepared(const std::string& body, double radius = 2.0) {
    std::istringstream in(std::string(kHeader) + body);
    TrialDataset ds = parse_tracks(in, TrackFormat::Csv, "t", 5.0);
    ds = propagate_labels(std::move(ds));
    return detect_contact_candidates(std::move(ds), radius);
}

// one donor and one recipient side by side for two frames
const char* kPairTwoFrames =
    "0,D0,,D,1,0,0,1,0.5,0\n"
    "0,R0,,R,0,2.2,0,1,0.5,0\n"
    "1,D1,D0,D,1,0,0,1,0.5,0\n"
    "1,R1,R0,R,0,2.2,0,1,0.5,0\n";

}  // namespace

TEST_CASE("donor-recipient pair over two frames, no delay edges in support") {
    const TrialDataset ds = prepared(kPairTwoFrames);
    ModelConfig cfg = ModelConfig::make(ContactFn::Base, 30, 150, 15, 75, 0.5);
    const BayesNet net = build_network(ds, cfg);
    CHECK(net.var_count() == 8);
    CHECK(net.edge_count(EdgeKind::Lineage) == 4);
    CHECK(net.edge_count(EdgeKind::Delay) == 0);
    // one conjugation edge per frame, donor -> recipient only
    REQUIRE(net.edge_count(EdgeKind::Conjugation) == 2);
    for (VarIndex v = 0; v < net.var_count(); ++v) {
        for (const ParentEdge& e : net.parents[v]) {
            if (e.kind != EdgeKind::Conjugation) continue;
            CHECK(kind_of(e.src) == VarKind::Maturation);
            CHECK(kind_of(v) == VarKind::Gene);
            CHECK(ds.cells[cell_of(e.src)].label == CellType::Donor);
            CHECK(ds.cells[cell_of(v)].label == CellType::Recipient);
            CHECK(ds.cells[cell_of(e.src)].frame == ds.cells[cell_of(v)].frame);
        }
    }
}

TEST_CASE("single-frame maturation support adds the delay edge") {
    const TrialDataset ds = prepared(kPairTwoFrames);
    ModelConfig cfg = ModelConfig::make(ContactFn::Base, 30, 150, 5, 5, 0.5);
    const BayesNet net = build_network(ds, cfg);
    REQUIRE(net.edge_count(EdgeKind::Delay) == 2);  // one per lineage: g(X,0)->m(X,1)
    bool found = false;
    for (const ParentEdge& e : net.parents[var_of(3, VarKind::Maturation)]) {
        // cells sorted by (frame,id): 0=D0 1=R0 2=D1 3=R1
        if (e.kind == EdgeKind::Delay) {
            found = true;
            CHECK(cell_of(e.src) == 1);
            CHECK(kind_of(e.src) == VarKind::Gene);
            CHECK(e.weight == 1.0);  // point-mass delay
        }
    }
    CHECK(found);
}

TEST_CASE("isolated cell yields two vars and no edges") {
    const TrialDataset ds = prepared("0,A,,R,0,0,0,1,0.5,0\n");
    ModelConfig cfg = ModelConfig::make(ContactFn::Base, 30, 150, 15, 75, 0.5);
    const BayesNet net = build_network(ds, cfg);
    CHECK(net.var_count() == 2);
    CHECK(net.edge_count() == 0);
}

TEST_CASE("empty trial is rejected") {
    std::istringstream in(kHeader);
    const TrialDataset ds = parse_tracks(in, TrackFormat::Csv, "t", 5.0);
    ModelConfig cfg = ModelConfig::make(ContactFn::Base, 30, 150, 15, 75, 0.5);
    CHECK_THROWS_AS(build_network(ds, cfg), Error);
}

TEST_CASE("lineage edge count is twice the parent links") {
    const TrialDataset ds = prepared(
        "0,A,,R,0,0,0,1,0.5,0\n"
        "1,B,A,R,0,0,0,1,0.5,0\n"
        "2,C,B,R,0,-1,0,1,0.5,0\n"
        "2,D,B,R,0,1,0,1,0.5,0\n");
    ModelConfig cfg = ModelConfig::make(ContactFn::Base, 30, 150, 15, 75, 0.5);
    const BayesNet net = build_network(ds, cfg);
    CHECK(net.edge_count(EdgeKind::Lineage) == 2 * 3);
}

TEST_CASE("plasmid-lost daughters are disconnected") {
    TrialDataset ds = prepared(
        "0,P,,R,0,0,0,1,0.5,0\n"
        "1,A1,P,T,1,0,1,1,0.5,0\n"
        "1,B1,P,R,0,0,-1,1,0.5,0\n"
        "2,A2,A1,T,1,0,1,1,0.5,0\n"
        "2,B2,B1,R,0,0,-1,1,0.5,0\n");
    ds = repair_plasmid_loss(std::move(ds), 10.0, 20.0);
    REQUIRE(ds.loss_events.size() == 1);
    ModelConfig cfg = ModelConfig::make(ContactFn::Base, 10, 20, 5, 10, 0.5);
    const BayesNet net = build_network(ds, cfg);
    // B1 (index 2 at frame 1: cells are P,A1,B1,A2,B2) has no lineage parents
    const int32_t b1 = 2;
    CHECK(ds.cells[b1].id == "B1");
    for (const ParentEdge& e : net.parents[var_of(b1, VarKind::Gene)])
        CHECK(e.kind != EdgeKind::Lineage);
    for (const ParentEdge& e : net.parents[var_of(b1, VarKind::Maturation)])
        CHECK(e.kind != EdgeKind::Lineage);
}

TEST_CASE("no zero-weight edges and no duplicate parents") {
    const TrialDataset ds = prepared(
        "0,D0,,D,1,0,0,1,0.45,0\n"
        "0,R0,,R,0,2.1,0.3,1,0.45,0.2\n"
        "0,S0,,R,0,4.3,0.1,1,0.45,0\n"
        "1,D1,D0,D,1,0,0,1,0.45,0\n"
        "1,R1,R0,R,0,2.1,0.3,1,0.45,0.2\n"
        "1,S1,S0,R,0,4.3,0.1,1,0.45,0\n"
        "2,D2,D1,D,1,0,0,1,0.45,0\n"
        "2,R2,R1,T,1,2.1,0.3,1,0.45,0.2\n"
        "2,S2,S1,R,0,4.3,0.1,1,0.45,0\n");
    ModelConfig cfg = ModelConfig::make(ContactFn::Edge, 10, 30, 5, 20, 0.8);
    const BayesNet net = build_network(ds, cfg);
    for (VarIndex v = 0; v < net.var_count(); ++v) {
        std::set<VarIndex> seen;
        for (const ParentEdge& e : net.parents[v]) {
            CHECK(e.weight > 0.0);
            CHECK(e.weight <= 1.0);
            CHECK(seen.insert(e.src).second);
        }
    }
}

TEST_CASE("conjugation edges never target expressing or donor cells") {
    const TrialDataset ds = prepared(
        "0,D0,,D,1,0,0,1,0.45,0\n"
        "0,R0,,R,0,2.1,0,1,0.45,0\n"
        "1,D1,D0,D,1,0,0,1,0.45,0\n"
        "1,T1,R0,T,1,2.1,0,1,0.45,0\n");
    ModelConfig cfg = ModelConfig::make(ContactFn::Base, 10, 30, 5, 20, 0.6);
    const BayesNet net = build_network(ds, cfg);
    for (VarIndex v = 0; v < net.var_count(); ++v) {
        for (const ParentEdge& e : net.parents[v]) {
            if (e.kind != EdgeKind::Conjugation) continue;
            const Cell& target = ds.cells[cell_of(v)];
            CHECK_FALSE(target.rfp);
            CHECK(target.label != CellType::Donor);
        }
    }
    // frame 1 has no eligible target (T1 expresses), so only frame 0 has one
    CHECK(net.edge_count(EdgeKind::Conjugation) == 1);
}

TEST_CASE("conjugation edge count is monotone in contact range") {
    const TrialDataset ds = prepared(
        "0,D0,,D,1,0,0,1,0.45,0\n"
        "0,R0,,R,0,2.2,0,1,0.45,0\n"
        "0,S0,,R,0,4.9,0,1,0.45,0\n",
        5.0);
    size_t prev = 0;
    for (double range : {0.1, 0.4, 1.0, 3.0}) {
        ModelConfig cfg = ModelConfig::make(ContactFn::Base, 10, 30, 5, 20, range);
        const BayesNet net = build_network(ds, cfg);
        CHECK(net.edge_count(EdgeKind::Conjugation) >= prev);
        prev = net.edge_count(EdgeKind::Conjugation);
    }
}

TEST_CASE("assert_acyclic returns a valid topological order") {
    const TrialDataset ds = prepared(kPairTwoFrames);
    ModelConfig cfg = ModelConfig::make(ContactFn::Base, 30, 150, 5, 5, 0.5);
    const BayesNet net = build_network(ds, cfg);
    const auto order = assert_acyclic(net);
    std::vector<int> pos(net.var_count(), -1);
    for (size_t i = 0; i < order.size(); ++i) pos[order[i]] = static_cast<int>(i);
    for (VarIndex v = 0; v < net.var_count(); ++v)
        for (const ParentEdge& e : net.parents[v]) CHECK(pos[e.src] < pos[v]);
}

TEST_CASE("a forced cycle is reported with a witness") {
    BayesNet net;
    net.n_cells = 1;
    net.parents.assign(2, {});
    net.present.assign(2, 1);
    net.parents[var_of(0, VarKind::Gene)].push_back(
        {var_of(0, VarKind::Maturation), 0.5, EdgeKind::Conjugation});
    net.parents[var_of(0, VarKind::Maturation)].push_back(
        {var_of(0, VarKind::Gene), 0.5, EdgeKind::Delay});
    CHECK_THROWS_WITH_AS(assert_acyclic(net), doctest::Contains("cycle"), Error);
}

TEST_CASE("graph dump format") {
    const TrialDataset ds = prepared(kPairTwoFrames);
    ModelConfig cfg = ModelConfig::make(ContactFn::Base, 30, 150, 15, 75, 0.5);
    cfg.normalization_budget = 1.0;
    const BayesNet net = build_network(ds, cfg);
    std::ostringstream out;
    dump_graph(net, ds, out);
    const std::string dump = out.str();
    CHECK(dump.find("D0,g,D1,g,lineage,1\n") != std::string::npos);
    CHECK(dump.find("D0,m,R0,g,conjugation,0.5\n") != std::string::npos);
    CHECK(dump.find("D1,m,R1,g,conjugation,0.5\n") != std::string::npos);
}
