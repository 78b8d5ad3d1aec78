#include <sstream>

#include <doctest.h>

#include "../support/oracles.hpp"
#include "otkg/error.hpp"
#include <nlohmann/json.hpp>

#include "otkg/ingestion.hpp"
#include "otkg/risk.hpp"

using namespace otkg;
using otkg::testing::product;

namespace {

std::string error_text(auto&& fn, ErrorCode expected) {
    try {
        fn();
    } catch (const Error& e) {
        CHECK(e.code() == expected);
        return e.what();
    }
    FAIL("expected an otkg::Error");
    return {};
}

VulnRecord cve(std::string id, VulnStatus status, std::string description = "text") {
    VulnRecord r;
    r.cveId = std::move(id);
    r.status = status;
    r.description = std::move(description);
    return r;
}

TestbedSpec small_testbed() {
    TestbedSpec t;
    t.zones = {"DMZ", "Control"};
    t.products = {{"broker", "Eclipse", "Mosquitto", "MQTT Broker", "DMZ", std::nullopt, {"MQTT"}, {}, {}},
                  {"mes", "Siemens", "Opcenter", "Service", "DMZ", std::nullopt, {"MQTT"}, {}, {}},
                  {"plc", "Siemens", "S7-1500", "PLC", "Control", std::nullopt, {}, {}, {}},
                  {"plc2", "Siemens", "S7-1500", "PLC", "Control", std::nullopt, {}, {}, {}},
                  {"lonely", "Nobody", "Widget", "Sensor", "Control", std::nullopt, {}, {}, {}}};
    return t;
}

}  // namespace

TEST_CASE("node and relation csv loading") {
    KnowledgeGraph g;
    Ingestor ing(g);
    std::istringstream nodes(
        "id,kind,name,zone,criticality,props_json\n"
        "CVE-1,Vulnerability,CVE-1,,,\"{\"\"epss\"\": 0.4, \"\"baseScore\"\": 7.5}\"\n"
        "CWE-20,Weakness,Improper Input Validation,,,\n"
        "CAPEC-10,AttackPattern,Buffer Overflow,,,\n"
        "CWE-20,Weakness,Improper Input Validation,,,\n");
    CHECK(ing.load_nodes(nodes, "node.csv") == 3);
    std::istringstream rels("src,dst,kind,props_json\nCVE-1,CWE-20,HAS_CWE,\nCWE-20,CAPEC-10,HAS_CAPEC,{}\n");
    CHECK(ing.load_relations(rels, "relation.csv") == 2);
    CHECK(g.node_count() == 3);
    CHECK(g.edge_count() == 2);
    CHECK(vuln_scores(g.node(g.require("CVE-1"))).epss == doctest::Approx(0.4));

    std::istringstream dangling("src,dst,kind,props_json\nCVE-1,CWE-20,HAS_CWE,\nCWE-20,CAPEC-99,HAS_CAPEC,\n");
    const auto msg = error_text([&] { ing.load_relations(dangling, "relation.csv"); },
                                ErrorCode::DanglingReference);
    CHECK(msg.find("relation.csv:3") != std::string::npos);

    std::istringstream no_kind("id,name\nx,y\n");
    error_text([&] { ing.load_nodes(no_kind, "node.csv"); }, ErrorCode::MissingColumn);
    std::istringstream bad_kind("id,kind,name,zone,criticality,props_json\nx,Gizmo,x,,,\n");
    error_text([&] { ing.load_nodes(bad_kind, "node.csv"); }, ErrorCode::BadEnum);
}

TEST_CASE("withdrawn CVEs are filtered with their relations") {
    KnowledgeGraph g;
    Ingestor ing(g);
    std::istringstream nodes(
        "id,kind,name,zone,criticality,props_json\n"
        "CVE-1,Vulnerability,CVE-1,,,\"{\"\"status\"\": \"\"REJECTED\"\"}\"\n"
        "CVE-2,Vulnerability,CVE-2,,,\"{\"\"status\"\": \"\"ACTIVE\"\"}\"\n"
        "CWE-20,Weakness,w,,,\n");
    CHECK(ing.load_nodes(nodes, "n") == 2);
    std::istringstream rels("src,dst,kind\nCVE-1,CWE-20,HAS_CWE\nCVE-2,CWE-20,HAS_CWE\n");
    CHECK(ing.load_relations(rels, "r") == 1);
    CHECK(ing.skipped_relations() == 1);
    CHECK(ing.filtered_ids().count("CVE-1") == 1);
}

TEST_CASE("preprocess_cves") {
    const auto out = preprocess_cves({cve("A", VulnStatus::Active), cve("B", VulnStatus::Rejected),
                                      cve("C", VulnStatus::Resolved)});
    REQUIRE(out.size() == 1);
    CHECK(out[0].cveId == "A");
    CHECK(preprocess_cves({}).empty());

    const auto clean = preprocess_cves({cve("D", VulnStatus::Active, "buffer\x01 over\tflow\n\n in  S7")});
    REQUIRE(clean.size() == 1);
    CHECK(clean[0].cveId == "D");
    CHECK(clean[0].description == "buffer over flow in S7");

    std::vector<VulnRecord> mixed{cve("E", VulnStatus::Active, " x\x7f y "), cve("F", VulnStatus::Rejected),
                                  cve("G", VulnStatus::Active)};
    const auto once = preprocess_cves(mixed);
    const auto twice = preprocess_cves(once);
    REQUIRE(once.size() == twice.size());
    for (std::size_t i = 0; i < once.size(); ++i) {
        CHECK(once[i].cveId == twice[i].cveId);
        CHECK(once[i].description == twice[i].description);
    }
}

TEST_CASE("link_products via CPE and advisories") {
    KnowledgeGraph g;
    auto t = small_testbed();
    add_testbed_products(g, t, RiskConfig{}.criticalityDefaults, 5);
    std::vector<VulnRecord> vulns;
    for (auto id : {"CVE-A", "CVE-B", "CVE-C"}) {
        VulnRecord r = cve(id, VulnStatus::Active);
        Node n;
        n.id = id;
        n.kind = NodeKind::Vulnerability;
        n.props = vuln_properties(r);
        g.upsert_node(n);
        vulns.push_back(r);
    }
    vulns[0].cpes = {"cpe:2.3:a:eclipse:mosquitto:2.0:*:*:*:*:*:*:*"};
    vulns[1].cpes = {"cpe:2.3:a:eclipse:mosquitto:1.6:*:*:*:*:*:*:*"};
    std::vector<Advisory> adv{{"ICSA-1", "SIEMENS", "S7 1500", {"CVE-C"}}};

    Diagnostics diag;
    const auto added = link_products(g, t, adv, CpeIndex::build(vulns), &diag);
    // broker: 2 CVEs by CPE; plc and plc2 share CVE-C (fan-in); mes and lonely unmatched
    CHECK(added == 4);
    const auto broker = g.require("broker");
    CHECK(g.out_edges(broker, EdgeKind::HasVulnerability).size() == 2);
    const auto c = g.require("CVE-C");
    CHECK(g.find_edge(g.require("plc"), c, EdgeKind::HasVulnerability));
    CHECK(g.find_edge(g.require("plc2"), c, EdgeKind::HasVulnerability));
    std::size_t unmatched = 0;
    for (const auto& w : diag.warnings) unmatched += w.find("no advisory or CPE match") != std::string::npos;
    CHECK(unmatched == 2);
}

TEST_CASE("dataflow edges") {
    KnowledgeGraph g;
    auto t = small_testbed();
    add_testbed_products(g, t, RiskConfig{}.criticalityDefaults, 5);
    t.dataflows = {{"broker", "mes", "MQTT"}, {"broker", "mes", "MQTT"}};
    CHECK(build_dataflow_edges(g, t) == 1);
    const auto e = g.find_edge(g.require("broker"), g.require("mes"), EdgeKind::CommunicatesWith);
    REQUIRE(e);
    CHECK(g.edge(*e).props.at("protocol") == "MQTT");
    CHECK_FALSE(g.edge(*e).risk.has_value());

    KnowledgeGraph h;
    t.dataflows.clear();
    add_testbed_products(h, t, RiskConfig{}.criticalityDefaults, 5);
    CHECK(build_dataflow_edges(h, t) == 0);
    CHECK(h.node(h.require("plc")).criticality == 9);
}

TEST_CASE("testbed validation rejects unknown endpoints") {
    nlohmann::json j = {{"zones", {"DMZ"}},
                        {"products", {{{"name", "a"}, {"zone", "DMZ"}}}},
                        {"dataflows", {{{"src", "a"}, {"dst", "ghost"}, {"protocol", "HTTP"}}}}};
    CHECK_THROWS_AS(testbed_from_json(j), Error);
}

TEST_CASE("import_predictions thresholds and kinds") {
    KnowledgeGraph g;
    for (auto [id, kind] : {std::pair{"CVE-1", NodeKind::Vulnerability}, {"CWE-1", NodeKind::Weakness},
                            {"T0800", NodeKind::Technique}, {"TA0100", NodeKind::Tactic},
                            {"CAPEC-1", NodeKind::AttackPattern}}) {
        Node n;
        n.id = id;
        n.kind = kind;
        g.upsert_node(n);
    }
    std::vector<PredictedRelation> rows{{"CVE-1", "CWE-1", EdgeKind::HasPossibleCwe, 0.9},
                                        {"CAPEC-1", "T0800", EdgeKind::HasPossibleTechnique, 0.5},
                                        {"T0800", "TA0100", EdgeKind::SuggestedTactic, 0.2}};
    CHECK(import_predictions(g, rows, 0.6) == 1);
    KnowledgeGraph h = g;
    CHECK(import_predictions(h, rows, 0.0) == 3);

    std::istringstream bad("src,dst,kind,confidence\nCVE-1,CWE-1,COMMUNICATES_WITH,0.9\n");
    error_text([&] { read_predictions(bad, "p.csv"); }, ErrorCode::BadEnum);
}

TEST_CASE("hierarchy audit") {
    KnowledgeGraph g;
    g.upsert_node(product("p"));
    Node v;
    v.id = "CVE-1";
    v.kind = NodeKind::Vulnerability;
    g.upsert_node(v);
    Node t;
    t.id = "T1";
    t.kind = NodeKind::Technique;
    g.upsert_node(t);
    g.upsert_edge("p", "CVE-1", EdgeKind::HasVulnerability);
    CHECK(audit_hierarchy(g).empty());
}
