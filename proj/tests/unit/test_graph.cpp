#include <sstream>

#include <doctest.h>

#include "../support/oracles.hpp"
#include "otkg/error.hpp"
#include "otkg/graph.hpp"
#include "otkg/ingestion.hpp"

using namespace otkg;
using otkg::testing::product;
using otkg::testing::risk_of;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an otkg::Error");
    return ErrorCode::InvariantViolation;
}

Node weakness(std::string id) {
    Node n;
    n.id = std::move(id);
    n.kind = NodeKind::Weakness;
    return n;
}

}  // namespace

TEST_CASE("upsert_node is idempotent and validates") {
    KnowledgeGraph g;
    const auto a = g.upsert_node(product("PLC.RobotCell_3"));
    const auto b = g.upsert_node(product("PLC.RobotCell_3"));
    CHECK(a == b);
    CHECK(g.node_count() == 1);

    CHECK(code_of([&] { g.upsert_node(product("bad", "Control", 11)); }) ==
          ErrorCode::InvalidCriticality);

    Node clash;
    clash.id = "PLC.RobotCell_3";
    clash.kind = NodeKind::Vulnerability;
    CHECK(code_of([&] { g.upsert_node(clash); }) == ErrorCode::KindConflict);
}

TEST_CASE("upsert_edge enforces endpoint kinds") {
    KnowledgeGraph g;
    g.upsert_node(product("a"));
    g.upsert_node(product("b"));
    g.upsert_node(weakness("CWE-20"));
    Node v;
    v.id = "CVE-1";
    v.kind = NodeKind::Vulnerability;
    g.upsert_node(v);

    g.upsert_edge("a", "b", EdgeKind::CommunicatesWith, risk_of(0.5, 0.5));
    CHECK(g.edge_count() == 1);
    CHECK(code_of([&] { g.upsert_edge("a", "CWE-20", EdgeKind::CommunicatesWith, risk_of(0.1, 0.1)); }) ==
          ErrorCode::KindConstraintViolation);
    CHECK(code_of([&] { g.upsert_edge("a", "zz", EdgeKind::CommunicatesWith); }) ==
          ErrorCode::MissingEndpoint);

    const auto e = g.upsert_edge("CVE-1", "CWE-20", EdgeKind::HasCwe);
    CHECK_FALSE(g.edge(e).risk.has_value());

    // duplicate (src,dst,kind) replaces risk and props
    g.upsert_edge("a", "b", EdgeKind::CommunicatesWith, risk_of(0.25, 0.2), {{"protocol", "MQTT"}});
    CHECK(g.edge_count() == 2);
    const auto ab = g.find_edge(g.require("a"), g.require("b"), EdgeKind::CommunicatesWith);
    REQUIRE(ab);
    CHECK(g.edge(*ab).risk->pExploit == 0.25);
    CHECK(g.edge(*ab).props.at("protocol") == "MQTT");
}

TEST_CASE("views filter by configuration") {
    KnowledgeGraph g;
    for (auto id : {"a", "b", "c", "d"}) g.upsert_node(product(id));
    g.upsert_edge("a", "b", EdgeKind::CommunicatesWith, risk_of(0.5, 0.5));
    g.upsert_edge("b", "c", EdgeKind::CommunicatesWith, risk_of(0.5, 0.5));
    g.upsert_edge("c", "d", EdgeKind::CommunicatesWith, risk_of(0.5, 0.5));
    g.upsert_edge("a", "c", EdgeKind::HasPossibleCommunication, risk_of(0.5, 0.5));
    g.upsert_edge("a", "d", EdgeKind::HasPossibleCommunication, risk_of(0.5, 0.5));
    g.upsert_edge("a", "b", EdgeKind::ControlledCommunicatesWith, risk_of(0.5, 0.3));
    g.upsert_edge("b", "c", EdgeKind::ControlledCommunicatesWith, risk_of(0.04, 0.04));

    CHECK(code_of([&] { project_view(g, Configuration::Original); }) == ErrorCode::GraphNotFinalized);
    g.finalize();

    const auto nodes = g.node_count();
    const auto edges = g.edge_count();
    const auto orig = project_view(g, Configuration::Original);
    const auto enr = project_view(g, Configuration::Enriched);
    const auto ctl = project_view(g, Configuration::Controlled);
    CHECK(orig.active_edges().size() == 3);
    CHECK(enr.active_edges().size() == 5);
    CHECK(ctl.active_edges().size() == 1);
    for (EdgeIndex e : orig.active_edges()) CHECK(enr.is_active(e));
    for (EdgeIndex e : ctl.active_edges()) CHECK(g.edge(e).risk->riskWeight >= 0.05);
    CHECK(g.node_count() == nodes);
    CHECK(g.edge_count() == edges);

    // traversal is undirected
    const auto nb = neighbors(orig, g.require("b"));
    REQUIRE(nb.size() == 2);
    CHECK(g.node(nb[0].node).id == "a");
    CHECK(g.node(nb[1].node).id == "c");
    // the pruned b-c mirror leaves c without Controlled neighbours
    CHECK(neighbors(ctl, g.require("c")).empty());
    CHECK(neighbors(ctl, g.require("d")).empty());
}

TEST_CASE("empty graph projects to an empty view") {
    KnowledgeGraph g;
    g.finalize();
    const auto v = project_view(g, Configuration::Controlled);
    CHECK(v.active_edges().empty());
    CHECK(v.members().empty());
}

TEST_CASE("export is deterministic and edge csv round-trips") {
    KnowledgeGraph g;
    g.upsert_node(product("b", "DMZ", 7));
    g.upsert_node(product("a", "Control", 9));
    g.upsert_edge("a", "b", EdgeKind::CommunicatesWith, risk_of(0.375, 0.25, 0.6, 0.5), {{"protocol", "HTTP"}});
    g.finalize();
    const auto v = project_view(g, Configuration::Original);

    std::ostringstream dot;
    export_view(v, ExportFormat::Dot, dot);
    std::size_t arrows = 0;
    for (std::size_t p = dot.str().find("->"); p != std::string::npos; p = dot.str().find("->", p + 1)) ++arrows;
    CHECK(arrows == 1);

    std::ostringstream x1, x2, ml;
    export_view(v, ExportFormat::EdgeCsv, x1);
    export_view(v, ExportFormat::EdgeCsv, x2);
    export_view(v, ExportFormat::GraphMl, ml);
    CHECK(x1.str() == x2.str());
    CHECK(x1.str().rfind(std::string(kEdgeCsvHeader), 0) == 0);
    CHECK(ml.str().find("<graphml") != std::string::npos);

    std::ostringstream nodes;
    write_node_csv(g, nodes);
    KnowledgeGraph h;
    Ingestor in(h);
    std::istringstream ns(nodes.str());
    CHECK(in.load_nodes(ns, "nodes") == 2);
    std::istringstream es(x1.str());
    CHECK(in.load_edge_csv(es, "edges") == 1);
    h.finalize();
    CHECK(h.node_count() == g.node_count());
    CHECK(h.edge_count() == g.edge_count());
    const auto e = h.find_edge(h.require("a"), h.require("b"), EdgeKind::CommunicatesWith);
    REQUIRE(e);
    CHECK(*h.edge(*e).risk == *g.edge(0).risk);
    CHECK(h.edge(*e).props.at("protocol") == "HTTP");
    CHECK(h.node(h.require("a")).criticality == 9);

    std::ostringstream again;
    export_view(project_view(h, Configuration::Original), ExportFormat::EdgeCsv, again);
    CHECK(again.str() == x1.str());
}

TEST_CASE("annotation scan notices missing attributes") {
    KnowledgeGraph g;
    g.upsert_node(product("a"));
    g.upsert_node(product("b"));
    const auto e = g.upsert_edge("a", "b", EdgeKind::CommunicatesWith);
    CHECK_FALSE(all_communication_edges_annotated(g));
    g.set_risk(e, risk_of(0.1, 0.1));
    CHECK(all_communication_edges_annotated(g));
}
