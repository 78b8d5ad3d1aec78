#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "otkg/analytics.hpp"
#include "otkg/csv.hpp"
#include "otkg/error.hpp"
#include "otkg/risk.hpp"

namespace otkg {

using nlohmann::json;

namespace {

struct WeightedEdge {
    std::uint32_t u;
    std::uint32_t v;
    double w;
};

/// Active edges between members as (position, position, weight).
std::vector<WeightedEdge> member_edges(const GraphView& view, bool weighted) {
    std::vector<WeightedEdge> out;
    const KnowledgeGraph& graph = view.graph();
    for (EdgeIndex e : view.active_edges()) {
        const Edge& edge = graph.edge(e);
        auto u = view.member_position(edge.src);
        auto v = view.member_position(edge.dst);
        if (!u || !v) continue;
        const double w = weighted ? (edge.risk ? edge.risk->riskWeight : 0.0) : 1.0;
        out.push_back({static_cast<std::uint32_t>(*u), static_cast<std::uint32_t>(*v), w});
    }
    return out;
}

/// Undirected weighted graph used by Louvain levels. Self loops hold
/// intra-community weight after aggregation.
struct LevelGraph {
    std::vector<std::map<std::uint32_t, double>> adj;  // excludes self loops
    std::vector<double> self;
    double total = 0.0;  // m: each edge once, self loops once

    double degree(std::uint32_t i) const {
        double k = 2.0 * self[i];
        for (const auto& [j, w] : adj[i]) k += w;
        return k;
    }
};

double level_modularity(const LevelGraph& g, const std::vector<std::uint32_t>& comm) {
    if (g.total <= 0.0) return 0.0;
    std::map<std::uint32_t, double> inside;
    std::map<std::uint32_t, double> deg;
    for (std::uint32_t i = 0; i < g.adj.size(); ++i) {
        inside[comm[i]] += g.self[i];
        deg[comm[i]] += g.degree(i);
        for (const auto& [j, w] : g.adj[i]) {
            if (j > i && comm[j] == comm[i]) inside[comm[i]] += w;
        }
    }
    double q = 0.0;
    for (const auto& [c, d] : deg) {
        const double x = d / (2.0 * g.total);
        q += inside[c] / g.total - x * x;
    }
    return q;
}

LevelGraph base_level(const GraphView& view, bool weighted) {
    LevelGraph g;
    const std::size_t n = view.members().size();
    g.adj.resize(n);
    g.self.assign(n, 0.0);
    for (const auto& e : member_edges(view, weighted)) {
        if (e.w == 0.0) continue;
        g.adj[e.u][e.v] += e.w;
        g.adj[e.v][e.u] += e.w;
        g.total += e.w;
    }
    return g;
}

/// One local-moving phase. Returns true when any node moved.
bool local_moving(const LevelGraph& g, std::vector<std::uint32_t>& comm, std::mt19937_64& rng) {
    const std::size_t n = g.adj.size();
    std::vector<double> k(n);
    std::vector<double> tot(n, 0.0);
    for (std::uint32_t i = 0; i < n; ++i) {
        k[i] = g.degree(i);
        tot[comm[i]] += k[i];
    }
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    for (std::size_t i = n; i > 1; --i) {
        std::swap(order[i - 1], order[rng() % i]);
    }
    const double two_m = 2.0 * g.total;
    bool any = false;
    bool moved = true;
    while (moved) {
        moved = false;
        for (std::uint32_t i : order) {
            const std::uint32_t ci = comm[i];
            std::map<std::uint32_t, double> links;
            for (const auto& [j, w] : g.adj[i]) links[comm[j]] += w;
            tot[ci] -= k[i];
            std::uint32_t best = ci;
            double best_gain = links[ci] - tot[ci] * k[i] / two_m;
            for (const auto& [c, w] : links) {
                const double gain = w - tot[c] * k[i] / two_m;
                if (gain > best_gain + 1e-12) {
                    best = c;
                    best_gain = gain;
                }
            }
            tot[best] += k[i];
            if (best != ci) {
                comm[i] = best;
                moved = true;
                any = true;
            }
        }
    }
    return any;
}

}  // namespace

// ---------------------------------------------------------------------------
// PageRank

std::vector<double> pagerank(const GraphView& view, double damping, double tol, bool weighted) {
    const std::size_t n = view.members().size();
    if (n == 0) {
        fail(ErrorCode::EmptyGraph, "pagerank over an empty view");
    }
    std::vector<std::vector<std::pair<std::uint32_t, double>>> in(n);
    std::vector<double> out_weight(n, 0.0);
    for (const auto& e : member_edges(view, weighted)) {
        if (e.w <= 0.0) continue;
        in[e.v].emplace_back(e.u, e.w);
        in[e.u].emplace_back(e.v, e.w);
        out_weight[e.u] += e.w;
        out_weight[e.v] += e.w;
    }
    std::vector<double> rank(n, 1.0 / static_cast<double>(n));
    std::vector<double> next(n);
    for (int iter = 0; iter < 100000; ++iter) {
        double dangling = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (out_weight[i] == 0.0) dangling += rank[i];
        }
        const double base = (1.0 - damping) / static_cast<double>(n) +
                            damping * dangling / static_cast<double>(n);
        double diff = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
            double s = 0.0;
            for (const auto& [u, w] : in[v]) s += rank[u] * w / out_weight[u];
            next[v] = base + damping * s;
            diff += std::abs(next[v] - rank[v]);
        }
        rank.swap(next);
        if (diff < tol) break;
    }
    const double sum = std::accumulate(rank.begin(), rank.end(), 0.0);
    for (double& r : rank) r /= sum;
    return rank;
}

// ---------------------------------------------------------------------------
// Louvain

double modularity(const GraphView& view, const std::vector<std::size_t>& labels, bool weighted) {
    const LevelGraph g = base_level(view, weighted);
    if (labels.size() != g.adj.size()) {
        fail(ErrorCode::BadValue, "partition size does not match the view");
    }
    std::vector<std::uint32_t> comm(labels.begin(), labels.end());
    return level_modularity(g, comm);
}

CommunityReport louvain(const GraphView& view, bool weighted, std::uint64_t seed) {
    const std::size_t n = view.members().size();
    if (n == 0) {
        fail(ErrorCode::EmptyGraph, "louvain over an empty view");
    }
    const LevelGraph base = base_level(view, weighted);
    std::vector<std::uint32_t> label(n);
    std::iota(label.begin(), label.end(), 0u);

    CommunityReport report;
    report.modularityTrace.push_back(level_modularity(base, label));

    if (base.total > 0.0) {
        std::mt19937_64 rng(seed);
        LevelGraph level = base;
        while (true) {
            std::vector<std::uint32_t> comm(level.adj.size());
            std::iota(comm.begin(), comm.end(), 0u);
            if (!local_moving(level, comm, rng)) break;

            std::map<std::uint32_t, std::uint32_t> renumber;
            for (auto c : comm) renumber.emplace(c, 0);
            std::uint32_t next_id = 0;
            for (auto& [c, id] : renumber) id = next_id++;
            for (auto& l : label) l = renumber[comm[l]];

            LevelGraph agg;
            agg.adj.resize(next_id);
            agg.self.assign(next_id, 0.0);
            agg.total = level.total;
            for (std::uint32_t i = 0; i < level.adj.size(); ++i) {
                const auto ci = renumber[comm[i]];
                agg.self[ci] += level.self[i];
                for (const auto& [j, w] : level.adj[i]) {
                    if (j < i) continue;
                    const auto cj = renumber[comm[j]];
                    if (ci == cj) {
                        agg.self[ci] += w;
                    } else {
                        agg.adj[ci][cj] += w;
                        agg.adj[cj][ci] += w;
                    }
                }
            }
            level = std::move(agg);
            report.modularityTrace.push_back(level_modularity(base, label));
            if (level.adj.size() == 1) break;
        }
    }

    // Number communities by their smallest member position.
    std::map<std::uint32_t, std::size_t> final_id;
    for (std::size_t i = 0; i < n; ++i) {
        if (!final_id.count(label[i])) {
            const std::size_t id = final_id.size();
            final_id[label[i]] = id;
        }
    }
    report.assignment.resize(n);
    report.communities.resize(final_id.size());
    const auto members = view.members();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t id = final_id[label[i]];
        report.assignment[i] = id;
        report.communities[id].id = id;
        report.communities[id].members.push_back(members[i]);
    }
    const KnowledgeGraph& graph = view.graph();
    for (auto& c : report.communities) {
        for (NodeIndex m : c.members) c.aggregateRisk += exposure(view, m);
    }
    for (EdgeIndex e : view.active_edges()) {
        const Edge& edge = graph.edge(e);
        auto u = view.member_position(edge.src);
        auto v = view.member_position(edge.dst);
        if (!u || !v || report.assignment[*u] != report.assignment[*v]) continue;
        const Node& a = graph.node(edge.src);
        const Node& b = graph.node(edge.dst);
        if (edge.risk && edge.risk->pExploit > 0.5 && a.zone != b.zone) {
            report.communities[report.assignment[*u]].cascade = true;
        }
    }
    std::vector<std::size_t> labels(report.assignment);
    report.modularity = modularity(view, labels, weighted);
    return report;
}

// ---------------------------------------------------------------------------
// Reports

std::vector<InterproductRow> rank_interproduct_risk(const GraphView& view, std::size_t top_n) {
    const KnowledgeGraph& graph = view.graph();
    std::vector<InterproductRow> rows;
    for (EdgeIndex e : view.active_edges()) {
        const Edge& edge = graph.edge(e);
        if (!edge.risk) continue;
        rows.push_back(InterproductRow{graph.node(edge.src).id, graph.node(edge.dst).id,
                                       edge.risk->riskWeight, edge.risk->pExploit,
                                       edge.risk->attackCost});
    }
    std::sort(rows.begin(), rows.end(), [](const InterproductRow& a, const InterproductRow& b) {
        if (a.risk != b.risk) return a.risk > b.risk;
        if (a.attackCost != b.attackCost) return a.attackCost > b.attackCost;
        return std::tie(a.source, a.target) < std::tie(b.source, b.target);
    });
    if (rows.size() > top_n) rows.resize(top_n);
    return rows;
}

std::vector<ResidualRow> residual_risk_report(const GraphView& original, const GraphView& enriched,
                                              const GraphView& controlled) {
    if (&original.graph() != &enriched.graph() || &original.graph() != &controlled.graph()) {
        fail(ErrorCode::BadValue, "residual risk views must share one graph");
    }
    std::vector<ResidualRow> rows;
    const KnowledgeGraph& graph = original.graph();
    for (NodeIndex m : original.members()) {
        const Node& node = graph.node(m);
        ResidualRow r;
        r.product = node.id;
        r.zone = node.zone.value_or("");
        r.raw = exposure(original, m);
        r.enriched = exposure(enriched, m);
        r.after = exposure(controlled, m);
        r.delta = r.after - r.raw;
        r.reductionPct = r.raw == 0.0 ? 100 : std::lround(100.0 * r.after / r.raw);
        rows.push_back(std::move(r));
    }
    std::sort(rows.begin(), rows.end(), [](const ResidualRow& a, const ResidualRow& b) {
        if (a.raw != b.raw) return a.raw > b.raw;
        return a.product < b.product;
    });
    return rows;
}

std::string format_number(double v) {
    if (v == 0.0) return "0";
    return fmt::format("{}", v);
}

void write_interproduct_csv(std::ostream& out, const std::vector<InterproductRow>& rows) {
    out << kInterproductColumns << '\n';
    for (const auto& r : rows) {
        csv::write_row(out, {r.source, r.target, format_number(r.risk), format_number(r.exploitProb),
                             format_number(r.attackCost)});
    }
}

void write_residual_csv(std::ostream& out, const std::vector<ResidualRow>& rows) {
    out << kResidualColumns << '\n';
    for (const auto& r : rows) {
        csv::write_row(out, {r.product, r.zone, format_number(r.raw), format_number(r.enriched),
                             format_number(r.after), format_number(r.delta),
                             std::to_string(r.reductionPct)});
    }
}

void write_community_csv(std::ostream& out, const GraphView& view, const CommunityReport& report) {
    out << kCommunityColumns << '\n';
    const KnowledgeGraph& graph = view.graph();
    for (const auto& c : report.communities) {
        std::string members;
        for (NodeIndex m : c.members) {
            if (!members.empty()) members += ';';
            members += graph.node(m).id;
        }
        csv::write_row(out, {std::to_string(c.id), std::to_string(c.members.size()),
                             format_number(c.aggregateRisk), c.cascade ? "true" : "false", members});
    }
}

json to_json(const std::vector<InterproductRow>& rows) {
    json j = json::array();
    for (const auto& r : rows) {
        j.push_back({{"source", r.source},
                     {"target", r.target},
                     {"risk", r.risk},
                     {"exploitProb", r.exploitProb},
                     {"attackCost", r.attackCost}});
    }
    return j;
}

json to_json(const std::vector<ResidualRow>& rows) {
    json j = json::array();
    for (const auto& r : rows) {
        j.push_back({{"product", r.product},
                     {"zone", r.zone},
                     {"raw", r.raw},
                     {"enriched", r.enriched},
                     {"after", r.after},
                     {"delta", r.delta},
                     {"reductionPct", r.reductionPct}});
    }
    return j;
}

json to_json(const GraphView& view, const CommunityReport& report) {
    json j;
    j["modularity"] = report.modularity;
    j["modularityTrace"] = report.modularityTrace;
    j["communities"] = json::array();
    const KnowledgeGraph& graph = view.graph();
    for (const auto& c : report.communities) {
        json members = json::array();
        for (NodeIndex m : c.members) members.push_back(graph.node(m).id);
        j["communities"].push_back({{"community", c.id},
                                    {"size", c.members.size()},
                                    {"aggregateRisk", c.aggregateRisk},
                                    {"cascade", c.cascade},
                                    {"members", members}});
    }
    return j;
}

}  // namespace otkg
