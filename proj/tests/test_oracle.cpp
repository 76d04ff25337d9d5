#include <doctest.h>

#include "conjnet/errors.hpp"
#include "conjnet/oracle.hpp"

using namespace conjnet;

namespace {

BayesNet empty_net(int32_t n_cells) {
    BayesNet net;
    net.n_cells = n_cells;
    net.parents.assign(static_cast<size_t>(n_cells) * 2, {});
    net.present.assign(static_cast<size_t>(n_cells) * 2, 1);
    return net;
}

}  // namespace

TEST_CASE("leak-free root is never spontaneously active") {
    const BayesNet net = empty_net(1);
    const VarIndex g = var_of(0, VarKind::Gene);
    CHECK(enumerate_joint(net, {}, {{g, true}}) == 0.0);
    CHECK(enumerate_joint(net, {}, {{g, false}}) == 1.0);
}

TEST_CASE("weight-1 chain is deterministic") {
    BayesNet net = empty_net(1);
    const VarIndex g = var_of(0, VarKind::Gene);
    const VarIndex m = var_of(0, VarKind::Maturation);
    net.parents[m].push_back({g, 1.0, EdgeKind::Delay});
    CHECK(enumerate_joint(net, {{g, true}}, {{m, true}}) == doctest::Approx(1.0));
    CHECK(enumerate_joint(net, {{g, false}}, {{m, true}}) == doctest::Approx(0.0));
}

TEST_CASE("two active parents at one half combine to three quarters") {
    BayesNet net = empty_net(2);
    const VarIndex p1 = var_of(0, VarKind::Maturation);
    const VarIndex p2 = var_of(1, VarKind::Maturation);
    const VarIndex x = var_of(0, VarKind::Gene);
    net.parents[x].push_back({p1, 0.5, EdgeKind::Conjugation});
    net.parents[x].push_back({p2, 0.5, EdgeKind::Conjugation});
    CHECK(enumerate_joint(net, {{p1, true}, {p2, true}}, {{x, true}}) ==
          doctest::Approx(0.75));
}

TEST_CASE("marginals over a target sum to one") {
    BayesNet net = empty_net(2);
    const VarIndex p1 = var_of(0, VarKind::Maturation);
    const VarIndex x = var_of(0, VarKind::Gene);
    const VarIndex y = var_of(1, VarKind::Gene);
    net.parents[x].push_back({p1, 0.35, EdgeKind::Conjugation});
    net.parents[y].push_back({x, 0.8, EdgeKind::Conjugation});
    const Assignment evidence{{p1, true}};
    double total = 0.0;
    for (bool bx : {false, true})
        for (bool by : {false, true})
            total += enumerate_joint(net, evidence, {{x, bx}, {y, by}});
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("agrees with noisy-or on single-node families over a weight grid") {
    for (double w1 = 0.1; w1 < 0.95; w1 += 0.1) {
        for (double w2 = 0.1; w2 < 0.95; w2 += 0.1) {
            BayesNet net = empty_net(2);
            const VarIndex p1 = var_of(0, VarKind::Maturation);
            const VarIndex p2 = var_of(1, VarKind::Maturation);
            const VarIndex x = var_of(0, VarKind::Gene);
            net.parents[x].push_back({p1, w1, EdgeKind::Conjugation});
            net.parents[x].push_back({p2, w2, EdgeKind::Conjugation});
            const double expect = 1.0 - (1.0 - w1) * (1.0 - w2);
            CHECK(enumerate_joint(net, {{p1, true}, {p2, true}}, {{x, true}}) ==
                  doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("explaining away through an observed collider") {
    // x <- {a, b}; observing x=1 with a=0 raises the posterior of b
    BayesNet net = empty_net(2);
    const VarIndex a = var_of(0, VarKind::Maturation);
    const VarIndex b = var_of(1, VarKind::Maturation);
    const VarIndex x = var_of(0, VarKind::Gene);
    const VarIndex seed = var_of(1, VarKind::Gene);
    net.parents[a].push_back({seed, 0.3, EdgeKind::Delay});
    net.parents[b].push_back({seed, 0.3, EdgeKind::Delay});
    net.parents[x].push_back({a, 0.9, EdgeKind::Conjugation});
    net.parents[x].push_back({b, 0.9, EdgeKind::Conjugation});
    const double prior_b = enumerate_joint(net, {{seed, true}}, {{b, true}});
    const double post_b = enumerate_joint(net, {{seed, true}, {x, true}}, {{b, true}});
    CHECK(prior_b == doctest::Approx(0.3));
    CHECK(post_b > prior_b);
}

TEST_CASE("latent limit is enforced") {
    const BayesNet net = empty_net(12);  // 24 latent vars
    CHECK_THROWS_AS(enumerate_joint(net, {}, {}, 22), Error);
}
