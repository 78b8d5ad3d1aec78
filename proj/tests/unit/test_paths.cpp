#include <cmath>
#include <random>

#include <doctest.h>

#include "../support/oracles.hpp"
#include "otkg/analytics.hpp"
#include "otkg/error.hpp"
#include "otkg/risk.hpp"

using namespace otkg;
using namespace otkg::testing;

namespace {

constexpr WeightPolicy kPolicies[] = {WeightPolicy::Hop, WeightPolicy::RiskCost, WeightPolicy::MaxLikelihood};

KnowledgeGraph diamond() {
    KnowledgeGraph g;
    for (auto id : {"A", "B", "C", "D"}) g.upsert_node(product(id));
    g.upsert_edge("A", "B", EdgeKind::CommunicatesWith, risk_of(0.5, 0.25));
    g.upsert_edge("B", "D", EdgeKind::CommunicatesWith, risk_of(0.5, 0.25));
    g.upsert_edge("A", "C", EdgeKind::CommunicatesWith, risk_of(0.5, 0.125));
    g.upsert_edge("D", "C", EdgeKind::CommunicatesWith, risk_of(0.5, 0.125));
    g.finalize();
    return g;
}

}  // namespace

TEST_CASE("diamond has two shortest paths") {
    const auto g = diamond();
    const auto v = project_view(g, Configuration::Original);
    const auto paths = yen_k_shortest(v, g.require("A"), g.require("D"), 20, WeightPolicy::Hop);
    REQUIRE(paths.size() == 2);
    for (const auto& p : paths) {
        CHECK(p.totalCost == 2.0);
        CHECK(p.hopCount == 2);
        CHECK(p.pathProbability == 0.25);
    }
    CHECK(g.node(paths[0].nodes[1]).id == "B");
    CHECK(g.node(paths[1].nodes[1]).id == "C");

    // risk costs favour the C branch
    const auto rc = yen_k_shortest(v, g.require("A"), g.require("D"), 20, WeightPolicy::RiskCost);
    REQUIRE(rc.size() == 2);
    CHECK(g.node(rc[0].nodes[1]).id == "C");
    CHECK(rc[0].totalCost == 0.25);
}

TEST_CASE("unreachable targets return nothing") {
    KnowledgeGraph g;
    for (auto id : {"a", "b", "c"}) g.upsert_node(product(id));
    g.upsert_edge("a", "b", EdgeKind::CommunicatesWith, risk_of(0.5, 0.5));
    g.finalize();
    const auto v = project_view(g, Configuration::Original);
    CHECK(yen_k_shortest(v, g.require("a"), g.require("c"), 20, WeightPolicy::Hop).empty());
    CHECK_FALSE(dijkstra(v, g.require("a"), g.require("c"), WeightPolicy::Hop));
    const auto one = dijkstra(v, g.require("a"), g.require("b"), WeightPolicy::RiskCost);
    REQUIRE(one);
    CHECK(one->hopCount == 1);
    CHECK(one->totalCost == 0.5);
}

TEST_CASE("dijkstra picks the cheaper route") {
    KnowledgeGraph g;
    for (auto id : {"s", "m", "t"}) g.upsert_node(product(id));
    g.upsert_edge("s", "t", EdgeKind::CommunicatesWith, risk_of(0.5, 0.5));
    g.upsert_edge("s", "m", EdgeKind::CommunicatesWith, risk_of(0.5, 0.1));
    g.upsert_edge("m", "t", EdgeKind::CommunicatesWith, risk_of(0.5, 0.2));
    g.finalize();
    const auto v = project_view(g, Configuration::Original);
    const auto p = dijkstra(v, g.require("s"), g.require("t"), WeightPolicy::RiskCost);
    REQUIRE(p);
    CHECK(p->hopCount == 2);
    CHECK(p->totalCost == doctest::Approx(0.3));
    CHECK(dijkstra(v, g.require("s"), g.require("t"), WeightPolicy::Hop)->hopCount == 1);
}

TEST_CASE("yen equals exhaustive enumeration on small random graphs") {
    std::mt19937_64 rng(2024);
    std::size_t pairs = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 3 + trial % 7;
        const auto style = trial % 2 ? WeightStyle::Continuous : WeightStyle::Dyadic;
        const auto g = random_graph(rng, n, 0.45, EdgeKind::CommunicatesWith, style);
        const auto v = project_view(g, Configuration::Original);
        for (WeightPolicy policy : kPolicies) {
            for (std::size_t s = 0; s < n; ++s) {
                for (std::size_t t = 0; t < n; ++t) {
                    if (s == t) continue;
                    ++pairs;
                    CHECK(yen_matches_oracle(v, s, t, 20, policy));
                }
            }
        }
    }
    CHECK(pairs > 1000);
}

TEST_CASE("k=1 and dijkstra agree; max likelihood maximizes path probability") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 4 + trial % 5;
        const auto g = random_graph(rng, n, 0.5, EdgeKind::CommunicatesWith, WeightStyle::Continuous);
        const auto v = project_view(g, Configuration::Original);
        const auto members = v.members();
        for (WeightPolicy policy : kPolicies) {
            const auto d = dijkstra(v, members[0], members[n - 1], policy);
            const auto y = yen_k_shortest(v, members[0], members[n - 1], 1, policy);
            REQUIRE(d.has_value() == !y.empty());
            if (!d) continue;
            CHECK(d->nodes == y[0].nodes);
            CHECK(costs_equal(d->totalCost, y[0].totalCost));
        }
        const auto ml = dijkstra(v, members[0], members[n - 1], WeightPolicy::MaxLikelihood);
        if (!ml) continue;
        double best = 0.0;
        for (const auto& p : all_simple_paths(oracle_graph(v, WeightPolicy::Hop), 0, n - 1))
            best = std::max(best, p.probability);
        CHECK(ml->pathProbability == doctest::Approx(best).epsilon(1e-12));
    }
}

TEST_CASE("parallel edges use the cheapest one") {
    KnowledgeGraph g;
    for (auto id : {"a", "b"}) g.upsert_node(product(id));
    g.upsert_edge("a", "b", EdgeKind::CommunicatesWith, risk_of(0.2, 0.4));
    g.upsert_edge("b", "a", EdgeKind::HasPossibleCommunication, risk_of(0.9, 0.1));
    g.finalize();
    const auto v = project_view(g, Configuration::Enriched);
    const auto p = yen_k_shortest(v, g.require("a"), g.require("b"), 20, WeightPolicy::RiskCost);
    REQUIRE(p.size() == 1);
    CHECK(p[0].totalCost == 0.1);
    CHECK(p[0].pathProbability == 0.9);
}

TEST_CASE("make_path rejects gaps") {
    const auto g = diamond();
    const auto v = project_view(g, Configuration::Original);
    CHECK_THROWS_AS(make_path(v, {g.require("B"), g.require("C")}, WeightPolicy::Hop), Error);
    const auto p = make_path(v, {g.require("A"), g.require("B"), g.require("D")}, WeightPolicy::Hop);
    CHECK(p.hopCount == 2);
    CHECK(path_probability(g, p.edges) == p.pathProbability);
}
