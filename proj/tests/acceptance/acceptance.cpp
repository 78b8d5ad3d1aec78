// Acceptance checks 1-9. One PASS/FAIL line per criterion; exit status is the
// number of failures.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "../support/oracles.hpp"
#include "otkg/analytics.hpp"
#include "otkg/enrichment.hpp"
#include "otkg/error.hpp"
#include "otkg/ingestion.hpp"
#include "otkg/logsynth.hpp"
#include "otkg/pipeline.hpp"
#include "otkg/risk.hpp"
#include "otkg/scenario.hpp"

namespace fs = std::filesystem;
using namespace otkg;
using namespace otkg::testing;
using Clock = std::chrono::steady_clock;
using json = nlohmann::json;

namespace {

// Pinned tolerances and limits.
constexpr double kFormulaTol = 1e-12;
constexpr double kWeaknessTol = 0.015;
constexpr double kPageRankTol = 1e-6;
constexpr double kBetweennessTol = 1e-9;
constexpr double kEnrichedRatio = 0.9;
constexpr double kControlledRatio = 1.1;
constexpr double kPruneFloor = 0.05;
constexpr double kMonotoneSlack = 1e-12;

struct Check {
    std::vector<std::string> failures;
    void expect(bool ok, const std::string& what) {
        if (!ok && failures.size() < 5) failures.push_back(what);
        if (!ok) ++count;
    }
    std::size_t count = 0;
};

int g_failed = 0;

void report(int id, const std::string& title, double limit_s, const std::function<std::string(Check&)>& body) {
    Check c;
    std::string detail;
    const auto t0 = Clock::now();
    try {
        detail = body(c);
    } catch (const std::exception& e) {
        c.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    c.expect(secs < limit_s, fmt::format("runtime {:.3f}s over {:.0f}s", secs, limit_s));
    const bool ok = c.count == 0;
    if (!ok) ++g_failed;
    std::cout << fmt::format("{} {}: {} ({:.3f}s < {:.0f}s) {}\n", ok ? "PASS" : "FAIL", id, title, secs,
                             limit_s, detail);
    for (const auto& f : c.failures) std::cout << "    " << f << "\n";
    if (c.count > c.failures.size())
        std::cout << "    ... " << c.count - c.failures.size() << " more\n";
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// --- 1 ---------------------------------------------------------------------

std::string formulas(Check& c) {
    c.expect(close(control_strength({1, 1, 1, 1}, Convention::Literal), 1.0, kFormulaTol),
             "control_strength(1,1,1,1) literal");
    c.expect(close(control_strength({0, 0, 0, 0}, Convention::Complement), 1.0, kFormulaTol),
             "control_strength(0,0,0,0) complement");
    const std::vector<double> epss{0.5, 0.5};
    c.expect(close(p_exploit(epss, 0.0), 0.75, kFormulaTol), "p_exploit([0.5,0.5],0)");
    c.expect(close(p_exploit(epss, 0.2), 0.6, kFormulaTol), "p_exploit([0.5,0.5],0.2)");
    c.expect(close(risk_weight(0.5, 10), 0.5, kFormulaTol), "risk_weight(0.5,10)");
    c.expect(close(risk_weight(0.75, 8), 0.6, kFormulaTol), "risk_weight(0.75,8)");

    KnowledgeGraph g;
    for (auto id : {"a", "b", "c", "t"}) g.upsert_node(product(id));
    g.upsert_edge("a", "b", EdgeKind::CommunicatesWith, risk_of(0.5, 0.1));
    g.upsert_edge("b", "c", EdgeKind::CommunicatesWith, risk_of(0.5, 0.2));
    g.upsert_edge("a", "t", EdgeKind::CommunicatesWith, risk_of(0.5, 0.125));
    g.upsert_edge("b", "t", EdgeKind::CommunicatesWith, risk_of(0.5, 0.25));
    g.upsert_edge("c", "t", EdgeKind::CommunicatesWith, risk_of(0.5, 0.375));
    g.finalize();
    const auto ab = *g.find_edge(g.require("a"), g.require("b"), EdgeKind::CommunicatesWith);
    const auto bc = *g.find_edge(g.require("b"), g.require("c"), EdgeKind::CommunicatesWith);
    const std::vector<EdgeIndex> chain{ab, bc};
    c.expect(close(path_probability(g, chain), 0.25, kFormulaTol), "path_probability(0.5,0.5)");
    const auto v = project_view(g, Configuration::Original);
    c.expect(exposure(v, g.require("t")) == 0.75, "exposure of t is exactly 0.125+0.25+0.375");
    c.expect(close(exposure(v, g.require("c")), 0.2, kFormulaTol), "exposure of c");
    c.expect(exposure(v, g.require("a")) == 0.0, "exposure of a source");
    return "";
}

// --- 2 ---------------------------------------------------------------------

std::string worked_example(Check& c) {
    TestbedSpec t;
    t.zones = {"Operations", "Control"};
    t.protocols["OPC_UA"] = ProtocolTraits{true, true};
    t.products = {TestbedProduct{.name = "scada", .assetClass = "SCADA", .zone = "Operations"},
                  TestbedProduct{.name = "plc", .assetClass = "PLC", .zone = "Control"}};
    t.dataflows = {Dataflow{"scada", "plc", "OPC_UA"}};
    SynthProfile p;  // defaults are the worked-example rates
    p.durationHours = 1.0;
    p.perFlowSessionRate = 10000.0;
    const auto logs = generate(t, p);
    const auto f = derive_factors(logs, {"scada", "plc"});
    const ControlFactors want{0.03, 0.04, 0.03, 0.05};
    c.expect(close(f.a, want.a, kWeaknessTol), fmt::format("a {:.4f}", f.a));
    c.expect(close(f.c, want.c, kWeaknessTol), fmt::format("c {:.4f}", f.c));
    c.expect(close(f.e, want.e, kWeaknessTol), fmt::format("e {:.4f}", f.e));
    c.expect(close(f.h, want.h, kWeaknessTol), fmt::format("h {:.4f}", f.h));
    return fmt::format("(a,c,e,h)=({:.4f},{:.4f},{:.4f},{:.4f})", f.a, f.c, f.e, f.h);
}

// --- 3 ---------------------------------------------------------------------

std::string path_oracle(Check& c) {
    std::mt19937_64 rng(3);
    std::size_t queries = 0;
    const WeightPolicy policies[] = {WeightPolicy::Hop, WeightPolicy::RiskCost, WeightPolicy::MaxLikelihood};
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + trial % 9;
        const double density = 0.25 + 0.05 * (trial % 6);
        const auto style = trial % 2 ? WeightStyle::Continuous : WeightStyle::Dyadic;
        const auto g = random_graph(rng, n, density, EdgeKind::CommunicatesWith, style);
        const auto v = project_view(g, Configuration::Original);
        for (WeightPolicy policy : policies) {
            for (std::size_t s = 0; s < n; ++s) {
                for (std::size_t t = 0; t < n; ++t) {
                    if (s == t) continue;
                    ++queries;
                    c.expect(yen_matches_oracle(v, s, t, 20, policy),
                             fmt::format("graph {} {} {}->{}", trial, to_string(policy), s, t));
                }
            }
        }
    }
    return fmt::format("{} graphs, {} queries", 200, queries);
}

// --- 4 ---------------------------------------------------------------------

std::string centrality(Check& c) {
    std::mt19937_64 rng(4);
    double worst_pr = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + trial % 9;
        const bool weighted = trial % 2 == 1;
        const auto g = random_graph(rng, n, 0.35, EdgeKind::CommunicatesWith,
                                    trial % 3 ? WeightStyle::Continuous : WeightStyle::Dyadic);
        const auto v = project_view(g, Configuration::Original);
        const auto pr = pagerank(v, 0.85, 1e-10, weighted);
        const auto power = pagerank_power(v, 0.85, weighted);
        const auto linear = pagerank_linear(v, 0.85, weighted);
        for (std::size_t i = 0; i < n; ++i) {
            worst_pr = std::max({worst_pr, std::abs(pr[i] - power[i]), std::abs(pr[i] - linear[i])});
            c.expect(close(pr[i], power[i], kPageRankTol), fmt::format("pagerank graph {} node {}", trial, i));
            c.expect(close(pr[i], linear[i], kPageRankTol), fmt::format("pagerank/linear graph {}", trial));
        }
        const auto bc = betweenness(v);
        const auto naive = naive_betweenness(v);
        for (std::size_t i = 0; i < n; ++i)
            c.expect(close(bc[i], naive[i], kBetweennessTol), fmt::format("betweenness graph {} node {}", trial, i));
    }
    return fmt::format("max |dPR| {:.2e}", worst_pr);
}

// --- 5 ---------------------------------------------------------------------

std::string louvain_props(Check& c) {
    KnowledgeGraph g;
    for (auto id : {"a1", "a2", "a3", "b1", "b2", "b3"}) g.upsert_node(product(id));
    for (auto [x, y] : {std::pair{"a1", "a2"}, {"a2", "a3"}, {"a3", "a1"}, {"b1", "b2"}, {"b2", "b3"}, {"b3", "b1"}})
        g.upsert_edge(x, y, EdgeKind::CommunicatesWith, risk_of(0.5, 0.5));
    g.finalize();
    const auto v = project_view(g, Configuration::Original);
    const auto r = louvain(v, false, 42);
    c.expect(r.communities.size() == 2, fmt::format("{} communities", r.communities.size()));
    for (const auto& com : r.communities) c.expect(com.members.size() == 3, "community size");
    c.expect(close(r.modularity, 0.5, 1e-12), fmt::format("modularity {}", r.modularity));

    std::mt19937_64 rng(5);
    std::size_t passes = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto h = random_graph(rng, 10 + trial % 20, 0.2, EdgeKind::CommunicatesWith, WeightStyle::Continuous);
        const auto hv = project_view(h, Configuration::Original);
        for (bool weighted : {false, true}) {
            const auto lr = louvain(hv, weighted, 42 + trial);
            passes += lr.modularityTrace.size();
            for (std::size_t i = 1; i < lr.modularityTrace.size(); ++i)
                c.expect(lr.modularityTrace[i] >= lr.modularityTrace[i - 1] - kMonotoneSlack,
                         fmt::format("trace drop graph {}", trial));
            if (!weighted)
                c.expect(close(lr.modularity, oracle_modularity(hv, lr.assignment), 1e-9), "modularity oracle");
        }
    }
    return fmt::format("{} trace points", passes);
}

// --- 6 ---------------------------------------------------------------------

struct RandomTestbed {
    TestbedSpec spec;
    ControlProfile profile;
    std::vector<Scenario> scenarios;
};

RandomTestbed random_testbed(std::mt19937_64& rng, int index) {
    static const std::vector<std::string> zones{"Enterprise", "DMZ", "Operations", "Control", "Field"};
    static const std::vector<std::string> classes{"Workstation", "Historian", "SCADA", "HMI",
                                                  "PLC",         "Sensor",    "Gateway"};
    static const std::vector<std::pair<std::string, ProtocolTraits>> protocols{
        {"ModbusTCP", {false, false}}, {"OPC_UA", {true, true}}, {"MQTT", {true, false}}, {"HTTPS", {true, true}}};
    RandomTestbed t;
    t.spec.name = fmt::format("random-{}", index);
    t.spec.zones = zones;
    for (const auto& [name, traits] : protocols) t.spec.protocols[name] = traits;
    std::uniform_int_distribution<std::size_t> nprod(6, 16);
    const std::size_t n = nprod(rng);
    auto pick = [&](std::size_t m) { return std::uniform_int_distribution<std::size_t>(0, m - 1)(rng); };
    for (std::size_t i = 0; i < n; ++i) {
        TestbedProduct p;
        p.name = pid(i);
        p.vendor = "v";
        p.model = "m" + std::to_string(i);
        p.assetClass = classes[pick(classes.size())];
        p.zone = zones[pick(zones.size())];
        t.spec.products.push_back(p);
    }
    std::set<std::pair<std::size_t, std::size_t>> used;
    auto flow = [&](std::size_t a, std::size_t b) {
        if (a == b || !used.insert({std::min(a, b), std::max(a, b)}).second) return;
        const auto& proto = protocols[pick(protocols.size())].first;
        t.spec.dataflows.push_back(Dataflow{pid(a), pid(b), proto});
        for (std::size_t x : {a, b}) {
            auto& ps = t.spec.products[x].protocols;
            if (std::find(ps.begin(), ps.end(), proto) == ps.end()) ps.push_back(proto);
        }
    };
    for (std::size_t i = 1; i < n; ++i) flow(pick(i), i);
    std::bernoulli_distribution extra(0.1);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (extra(rng)) flow(a, b);

    const ControlType all[] = {ControlType::NetworkSegmentation, ControlType::PatchManagement,
                               ControlType::IntrusionDetection, ControlType::AccessControl,
                               ControlType::ConfigHardening};
    std::bernoulli_distribution enabled(0.6);
    for (ControlType ct : all)
        if (enabled(rng)) t.profile.enabled.insert(ct);
    // at least one flow survives segmentation
    t.profile.allowlist.push_back({t.spec.dataflows.front().src, t.spec.dataflows.front().dst});
    std::bernoulli_distribution allow(0.3);
    for (const auto& f : t.spec.dataflows)
        if (allow(rng)) t.profile.allowlist.push_back({f.src, f.dst});

    for (int s = 0; s < 4; ++s) {
        Scenario sc;
        sc.id = fmt::format("R{}", s);
        sc.source.ids = {pid(pick(n))};
        sc.target.ids = {pid(pick(n)), pid(pick(n))};
        t.scenarios.push_back(sc);
    }
    return t;
}

std::string ordering_laws(Check& c) {
    std::mt19937_64 rng(6);
    std::size_t controlled_edges = 0, compared_rows = 0;
    const RiskConfig risk;  // Complement convention by default
    for (int i = 0; i < 100; ++i) {
        const auto tb = random_testbed(rng, i);
        KnowledgeGraph g;
        add_testbed_products(g, tb.spec, risk.criticalityDefaults, risk.fallbackCriticality);
        build_dataflow_edges(g, tb.spec);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::uniform_int_distribution<int> ncve(0, 3);
        int serial = 0;
        for (const auto& p : tb.spec.products) {
            for (int k = ncve(rng); k > 0; --k) {
                Node v;
                v.id = fmt::format("CVE-2024-{:04}", serial++);
                v.kind = NodeKind::Vulnerability;
                v.props = {{"epss", fmt::format("{}", u(rng))}, {"baseScore", fmt::format("{}", 10 * u(rng))}};
                g.upsert_node(v);
                g.upsert_edge(p.name, v.id, EdgeKind::HasVulnerability);
            }
        }
        g.finalize();

        SynthProfile sp;
        sp.seed = 100 + i;
        sp.durationHours = 1.0;
        sp.perFlowSessionRate = 50.0;
        const auto baseline = generate(tb.spec, sp);
        const auto secured = generate_secured(tb.spec, sp, tb.profile);
        const LogIndex base_idx(baseline), sec_idx(secured);
        annotate(g, base_idx, risk);
        const auto original = project_view(g, Configuration::Original);
        FastRpOptions fo;
        fo.dim = 64;
        fo.seed = sp.seed;
        const auto links = knn_possible_links(fastrp_embed(original, fo), original, 3);
        add_possible_links(g, links);
        annotate(g, base_idx, risk);
        apply_controls(g, tb.profile, base_idx, sec_idx, risk);

        const auto views = project_all(g, risk.pruneThreshold);
        for (EdgeIndex e : views.controlled.active_edges()) {
            ++controlled_edges;
            c.expect(g.edge(e).risk && g.edge(e).risk->riskWeight >= kPruneFloor,
                     fmt::format("testbed {} controlled edge below floor", i));
        }
        for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
            const Edge& m = g.edge(e);
            if (m.kind != EdgeKind::ControlledCommunicatesWith) continue;
            for (EdgeKind k : {EdgeKind::CommunicatesWith, EdgeKind::HasPossibleCommunication}) {
                if (auto o = g.find_edge(m.src, m.dst, k)) {
                    c.expect(m.risk->pExploit <= g.edge(*o).risk->pExploit + kMonotoneSlack,
                             fmt::format("testbed {} control raised pExploit", i));
                }
            }
        }
        const auto rows = run_suite(views, tb.scenarios).rows;
        for (std::size_t r = 0; r + 2 < rows.size(); r += 3) {
            const auto& o = rows[r];
            const auto& en = rows[r + 1];
            const auto& ct = rows[r + 2];
            c.expect(o.config == Configuration::Original && en.config == Configuration::Enriched &&
                         ct.config == Configuration::Controlled,
                     "row order");
            c.expect(o.affected <= en.affected, fmt::format("testbed {} {} affected", i, o.scenarioId));
            c.expect(ct.affected <= en.affected, fmt::format("testbed {} {} controlled affected", i, o.scenarioId));
            if (o.paths > 0) {
                ++compared_rows;
                c.expect(en.paths > 0 && en.minHops <= o.minHops,
                         fmt::format("testbed {} {} minHops", i, o.scenarioId));
            }
        }
    }
    return fmt::format("100 testbeds, {} controlled edges, {} scenario rows with routes", controlled_edges,
                       compared_rows);
}

// --- 7 ---------------------------------------------------------------------

std::string trends(Check& c) {
    Pipeline p(load_run_config(OTKG_FIXTURE_DIR "/run-config.json"));
    p.controls();
    const auto suite = run_suite(p.views(), p.scenarios());
    const auto& o = suite.aggregate(Configuration::Original);
    const auto& e = suite.aggregate(Configuration::Enriched);
    const auto& k = suite.aggregate(Configuration::Controlled);
    c.expect(p.graph().nodes_of_kind(NodeKind::Product).size() == 60, "fixture has 60 products");
    c.expect(p.scenarios().size() == 15, "fixture has 15 scenarios");
    c.expect(o.scenariosWithPaths > 0, "Original has routes");
    c.expect(e.scenarioMeanHops <= kEnrichedRatio * o.scenarioMeanHops,
             fmt::format("Enriched {:.3f} > {:.2f} x Original {:.3f}", e.scenarioMeanHops, kEnrichedRatio,
                         o.scenarioMeanHops));
    c.expect(k.scenarioMeanHops >= kControlledRatio * o.scenarioMeanHops,
             fmt::format("Controlled {:.3f} < {:.2f} x Original {:.3f}", k.scenarioMeanHops, kControlledRatio,
                         o.scenarioMeanHops));
    c.expect(e.meanHops < o.meanHops && o.meanHops < k.meanHops,
             fmt::format("aggregate order {:.3f} {:.3f} {:.3f}", e.meanHops, o.meanHops, k.meanHops));
    return fmt::format("scenario means O {:.3f} E {:.3f} C {:.3f}; pooled O {:.3f} E {:.3f} C {:.3f}",
                       o.scenarioMeanHops, e.scenarioMeanHops, k.scenarioMeanHops, o.meanHops, e.meanHops,
                       k.meanHops);
}

// --- 8 ---------------------------------------------------------------------

fs::path scratch_root() {
    static const fs::path root = fs::temp_directory_path() / fmt::format("otkg-acceptance-{}", ::getpid());
    return root;
}

std::map<std::string, std::string> slurp_tree(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        std::ifstream in(entry.path(), std::ios::binary);
        out[fs::relative(entry.path(), root).string()] =
            std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    return out;
}

std::string determinism(Check& c) {
    const RunConfig config = load_run_config(OTKG_FIXTURE_DIR "/run-config.json");
    const fs::path a = scratch_root() / "a", b = scratch_root() / "b";
    fs::remove_all(scratch_root());
    const auto t0 = Clock::now();
    run_all(config, a);
    const auto t1 = Clock::now();
    run_all(config, b);
    const auto ta = slurp_tree(a), tb = slurp_tree(b);
    const auto t2 = Clock::now();
    const double single = std::chrono::duration<double>(t1 - t0).count();
    const double rerun = std::chrono::duration<double>(t2 - t1).count();
    c.expect(!ta.empty(), "output tree is empty");
    c.expect(ta.size() == tb.size(), fmt::format("{} vs {} files", ta.size(), tb.size()));
    for (const auto& [name, bytes] : ta) {
        auto it = tb.find(name);
        c.expect(it != tb.end() && it->second == bytes, "differs: " + name);
    }
    c.expect(rerun < 2.0 * single, fmt::format("rerun + compare {:.3f}s vs single {:.3f}s", rerun, single));
    return fmt::format("{} files identical; single {:.3f}s, rerun+compare {:.3f}s", ta.size(), single, rerun);
}

// --- 9 ---------------------------------------------------------------------

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
    return out;
}

std::string report_shapes(Check& c) {
    const fs::path dir = scratch_root() / "a" / "reports";
    // Column sets the published tables show, in our column names.
    const std::map<std::string, std::vector<std::string>> expected{
        {"propagation", {"scenario", "name", "config", "avgHops", "minHops", "maxHops", "affected"}},
        {"interproduct", {"source", "target", "risk", "exploitProb", "attackCost"}},
        {"centrality", {"node", "pageRankBefore", "pageRankAfter", "pageRankDelta", "betweennessBefore",
                        "betweennessAfter", "betweennessDelta"}},
        {"communities", {"community", "size", "aggregateRisk", "cascade", "members"}},
        {"residual", {"product", "zone", "raw", "enriched", "after", "delta", "reductionPct"}},
    };
    std::size_t rows = 0;
    for (const auto& [table, cols] : expected) {
        std::ifstream csv(dir / (table + ".csv"));
        std::string header;
        c.expect(static_cast<bool>(std::getline(csv, header)), table + ".csv missing");
        c.expect(split(header) == cols, table + " header: " + header);
        for (std::string line; std::getline(csv, line);) {
            ++rows;
            if (table != "communities" && table != "propagation")
                c.expect(split(line).size() == cols.size(), table + " row width: " + line);
        }
        std::ifstream js(dir / (table + ".json"));
        c.expect(static_cast<bool>(js), table + ".json missing");
        if (!js) continue;
        const json j = json::parse(js);
        c.expect(j.at("schemaVersion") == kReportSchemaVersion, table + " schemaVersion");
        const json& list = table == "communities" ? j.at("rows").at("communities") : j.at("rows");
        c.expect(list.size() > 0, table + ".json has no rows");
        for (const auto& row : list) {
            for (const auto& col : cols) c.expect(row.contains(col), table + ".json row lacks " + col);
        }
    }
    c.expect(std::string(kPropagationColumns).find("avgHops,minHops,maxHops,affected") != std::string::npos,
             "propagation Avg/Min/Max/Affected");
    c.expect(std::string(kResidualColumns).find("raw,enriched,after,delta,reductionPct") != std::string::npos,
             "residual Raw/Enr/After/Delta/Red");
    return fmt::format("5 tables, {} data rows", rows);
}

}  // namespace

int main() {
    report(1, "formula exactness", 1, formulas);
    report(2, "worked-example weakness scores", 5, worked_example);
    report(3, "k-shortest paths vs exhaustive enumeration", 30, path_oracle);
    report(4, "PageRank and betweenness oracles", 30, centrality);
    report(5, "Louvain properties", 5, louvain_props);
    report(6, "configuration ordering laws", 60, ordering_laws);
    report(7, "fixture trend reproduction", 10, trends);
    report(8, "determinism", 120, determinism);
    report(9, "report shapes", 1, report_shapes);
    fs::remove_all(scratch_root());
    std::cout << (g_failed == 0 ? "ALL PASS" : fmt::format("{} FAILED", g_failed)) << "\n";
    return g_failed;
}
