#include <sstream>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "../support/oracles.hpp"
#include "otkg/error.hpp"
#include "otkg/scenario.hpp"

using namespace otkg;
using namespace otkg::testing;

namespace {

Node asset(std::string id, std::string cls, std::string zone = "Control") {
    Node n = product(std::move(id), std::move(zone));
    n.props["assetClass"] = std::move(cls);
    return n;
}

// src reaches plc-a over 4 hops and 6 hops; plc-b is isolated.
KnowledgeGraph two_routes() {
    KnowledgeGraph g;
    g.upsert_node(asset("src", "Broker", "DMZ"));
    g.upsert_node(asset("plc-a", "PLC"));
    g.upsert_node(asset("plc-b", "PLC"));
    auto route = [&](const std::string& tag, int hops) {
        std::string prev = "src";
        for (int i = 1; i < hops; ++i) {
            const std::string id = tag + std::to_string(i);
            g.upsert_node(asset(id, "Switch"));
            g.upsert_edge(prev, id, EdgeKind::CommunicatesWith, risk_of(0.5, 0.5));
            prev = id;
        }
        g.upsert_edge(prev, "plc-a", EdgeKind::CommunicatesWith, risk_of(0.5, 0.5));
    };
    route("x", 4);
    route("y", 6);
    g.finalize();
    return g;
}

Scenario broker_to_plc() {
    Scenario s;
    s.id = "S1";
    s.name = "Broker -> PLC";
    s.source.ids = {"src"};
    s.target.assetClasses = {"PLC"};
    return s;
}

}  // namespace

TEST_CASE("selectors resolve by id, class, zone and protocol") {
    auto g = two_routes();
    Selector s;
    s.assetClasses = {"PLC"};
    const auto plcs = resolve(g, s, "t");
    REQUIRE(plcs.size() == 2);
    CHECK(g.node(plcs[0]).id == "plc-a");
    s.zone = "DMZ";
    CHECK_THROWS_AS(resolve(g, s, "t"), Error);
    Selector z;
    z.zone = "DMZ";
    CHECK(resolve(g, z, "t").size() == 1);
    CHECK_THROWS_AS(resolve(g, Selector{}, "t"), Error);

    Node n = asset("mb", "Broker");
    n.props["protocols"] = R"(["MQTT","HTTP"])";
    g.upsert_node(n);
    g.finalize();
    Selector p;
    p.protocol = "MQTT";
    const auto m = resolve(g, p, "t");
    REQUIRE(m.size() == 1);
    CHECK(g.node(m[0]).id == "mb");
}

TEST_CASE("hop statistics over two routes") {
    const auto g = two_routes();
    const auto views = project_all(g);
    const auto rows = run_scenario(views, broker_to_plc());
    REQUIRE(rows.size() == 3);
    const auto& o = rows[0];
    CHECK(o.config == Configuration::Original);
    CHECK(o.paths == 2);
    CHECK(o.avgHops == 5.0);
    CHECK(o.minHops == 4);
    CHECK(o.maxHops == 6);
    CHECK(o.affected == 1);
    CHECK(o.targets == 2);
    // no controlled edges exist, so that row is empty
    CHECK(rows[2].paths == 0);
    CHECK(rows[2].avgHops == 0.0);
    CHECK(rows[2].affected == 0);
}

TEST_CASE("k bounds the path count per pair") {
    const auto g = two_routes();
    auto s = broker_to_plc();
    s.k = 1;
    const auto rows = run_scenario(project_all(g), s, std::vector{Configuration::Original});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].paths == 1);
    CHECK(rows[0].avgHops == 4.0);
}

TEST_CASE("suite aggregates") {
    const auto g = two_routes();
    auto s2 = broker_to_plc();
    s2.id = "S2";
    s2.k = 1;
    auto s3 = broker_to_plc();
    s3.id = "S3";
    s3.target = Selector{};
    s3.target.ids = {"plc-b"};
    const auto suite = run_suite(project_all(g), {broker_to_plc(), s2, s3});
    CHECK(suite.rows.size() == 9);
    const auto& a = suite.aggregate(Configuration::Original);
    CHECK(a.samples == 3);
    CHECK(a.meanHops == doctest::Approx(14.0 / 3));
    CHECK(a.sdHops == doctest::Approx(std::sqrt(((4 - 14.0 / 3) * (4 - 14.0 / 3) * 2 +
                                                  (6 - 14.0 / 3) * (6 - 14.0 / 3)) / 2)));
    CHECK(a.ci95Low < a.meanHops);
    CHECK(a.ci95High > a.meanHops);
    CHECK(a.scenariosWithPaths == 2);
    CHECK(a.scenarioMeanHops == doctest::Approx(4.5));
    CHECK(suite.aggregate(Configuration::Controlled).samples == 0);

    std::ostringstream prop, agg, hops;
    write_propagation_csv(prop, suite);
    write_aggregate_csv(agg, suite);
    write_hops_plot_csv(hops, suite);
    CHECK(prop.str().rfind(std::string(kPropagationColumns) + "\nS1,Broker -> PLC,Original,5.00,4,6,1\n", 0) == 0);
    CHECK(agg.str().rfind(std::string(kAggregateColumns) + "\n", 0) == 0);
    CHECK(hops.str().rfind("scenario,Original,Enriched,Controlled\n", 0) == 0);

    const auto j = to_json(suite);
    CHECK(j.dump() == to_json(run_suite(project_all(g), {broker_to_plc(), s2, s3})).dump());
}

TEST_CASE("scenario catalog parsing") {
    const auto j = nlohmann::json::parse(R"({"scenarios":[
        {"id":"A","source":{"ids":["src"]},"target":{"assetClass":["PLC","HMI"]},"policy":"RiskCost","k":3},
        {"id":"B","name":"b","source":{"zone":"DMZ"},"target":{"protocol":"MQTT"}}]})");
    const auto s = scenarios_from_json(j);
    REQUIRE(s.size() == 2);
    CHECK(s[0].name == "A");
    CHECK(s[0].k == 3);
    CHECK(s[0].policy == WeightPolicy::RiskCost);
    CHECK(s[0].target.assetClasses.size() == 2);
    CHECK(s[1].k == 20);
    CHECK(s[1].policy == WeightPolicy::Hop);
    CHECK(*s[1].target.protocol == "MQTT");

    auto dup = j;
    dup["scenarios"][1]["id"] = "A";
    CHECK_THROWS_AS(scenarios_from_json(dup), Error);
    auto bad = j;
    bad["scenarios"][0]["policy"] = "Shortest";
    CHECK_THROWS_AS(scenarios_from_json(bad), Error);
    auto zero = j;
    zero["scenarios"][0]["k"] = 0;
    CHECK_THROWS_AS(scenarios_from_json(zero), Error);
    CHECK_THROWS_AS(load_scenarios("/nonexistent/scenarios.json"), Error);
}

TEST_CASE("centrality delta") {
    KnowledgeGraph g;
    for (auto id : {"a", "b", "c"}) g.upsert_node(product(id));
    g.upsert_edge("a", "b", EdgeKind::CommunicatesWith, risk_of(0.5, 0.5));
    g.upsert_edge("b", "c", EdgeKind::CommunicatesWith, risk_of(0.5, 0.5));
    g.finalize();
    const auto v = project_all(g);
    for (const auto& r : centrality_delta(v.original, v.enriched)) {
        CHECK(r.pageRankDelta == 0.0);
        CHECK(r.betweennessDelta == 0.0);
    }

    g.upsert_edge("a", "c", EdgeKind::HasPossibleCommunication, risk_of(0.5, 0.5));
    g.finalize();
    const auto w = project_all(g);
    const auto rows = centrality_delta(w.original, w.enriched);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].node == "b");
    CHECK(rows[0].betweennessBefore == 1.0);
    CHECK(rows[0].betweennessAfter == 0.0);
    CHECK(rows[0].betweennessDelta == -1.0);
    for (const auto& r : rows) CHECK(r.pageRankAfter == doctest::Approx(1.0 / 3));
    for (std::size_t i = 1; i < rows.size(); ++i)
        CHECK(std::abs(rows[i - 1].pageRankDelta) >= std::abs(rows[i].pageRankDelta));

    std::ostringstream csv;
    write_centrality_csv(csv, rows);
    CHECK(csv.str().rfind(std::string(kCentralityColumns) + "\n", 0) == 0);

    KnowledgeGraph other;
    other.upsert_node(product("z"));
    other.finalize();
    CHECK_THROWS_AS(centrality_delta(v.original, project_view(other, Configuration::Original)), Error);
}
