#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <set>

#include <fmt/format.h>

#include "otkg/analytics.hpp"
#include "otkg/error.hpp"

namespace otkg {

namespace {

constexpr std::string_view kPolicyNames[] = {"Hop", "RiskCost", "MaxLikelihood"};

struct Arc {
    std::uint32_t to;  // member position
    EdgeIndex edge;
    double cost;
};

/// Member-position adjacency with parallel edges collapsed to the best one.
struct SimpleGraph {
    const GraphView* view = nullptr;
    std::vector<std::vector<Arc>> adj;
};

bool better_parallel(const Edge& a, double ca, EdgeIndex ia, const Edge& b, double cb,
                     EdgeIndex ib) {
    if (ca != cb) return ca < cb;
    const double pa = a.risk ? a.risk->pExploit : 0.0;
    const double pb = b.risk ? b.risk->pExploit : 0.0;
    if (pa != pb) return pa > pb;
    return ia < ib;
}

SimpleGraph build_simple(const GraphView& view, WeightPolicy policy) {
    SimpleGraph g;
    g.view = &view;
    const auto members = view.members();
    g.adj.resize(members.size());
    const KnowledgeGraph& graph = view.graph();
    for (std::size_t p = 0; p < members.size(); ++p) {
        for (const Adjacent& a : view.adjacent(members[p])) {
            auto pos = view.member_position(a.node);
            if (!pos) {
                continue;
            }
            const Edge& e = graph.edge(a.edge);
            const double c = edge_cost(e, policy);
            auto& list = g.adj[p];
            if (!list.empty() && list.back().to == *pos) {
                Arc& cur = list.back();
                if (better_parallel(e, c, a.edge, graph.edge(cur.edge), cur.cost, cur.edge)) {
                    cur = Arc{static_cast<std::uint32_t>(*pos), a.edge, c};
                }
            } else {
                list.push_back(Arc{static_cast<std::uint32_t>(*pos), a.edge, c});
            }
        }
    }
    return g;
}

struct Dist {
    double cost = std::numeric_limits<double>::infinity();
    std::uint32_t hops = std::numeric_limits<std::uint32_t>::max();

    bool finite() const { return std::isfinite(cost); }
};

bool dist_less(const Dist& a, const Dist& b) {
    if (!costs_equal(a.cost, b.cost)) return a.cost < b.cost;
    return a.hops < b.hops;
}

bool dist_equal(const Dist& a, const Dist& b) {
    return costs_equal(a.cost, b.cost) && a.hops == b.hops;
}

Dist extend(const Dist& d, double cost) { return Dist{d.cost + cost, d.hops + 1}; }

/// Single-source compound distances honouring removed nodes and removed arcs at
/// `cut_node` (arcs to any position in `cut_to`).
std::vector<Dist> distances(const SimpleGraph& g, std::uint32_t source,
                            const std::vector<char>& removed, std::uint32_t cut_node,
                            const std::vector<std::uint32_t>& cut_to) {
    const auto cut = [&](std::uint32_t u, std::uint32_t v) {
        if (u == cut_node) return std::find(cut_to.begin(), cut_to.end(), v) != cut_to.end();
        if (v == cut_node) return std::find(cut_to.begin(), cut_to.end(), u) != cut_to.end();
        return false;
    };
    std::vector<Dist> dist(g.adj.size());
    std::vector<char> done(g.adj.size(), 0);
    using Item = std::pair<Dist, std::uint32_t>;
    const auto cmp = [](const Item& a, const Item& b) {
        if (dist_equal(a.first, b.first)) return a.second > b.second;
        return dist_less(b.first, a.first);
    };
    std::priority_queue<Item, std::vector<Item>, decltype(cmp)> pq(cmp);
    dist[source] = Dist{0.0, 0};
    pq.emplace(dist[source], source);
    while (!pq.empty()) {
        const auto [d, u] = pq.top();
        pq.pop();
        if (done[u]) continue;
        done[u] = 1;
        for (const Arc& a : g.adj[u]) {
            if (removed[a.to] || done[a.to] || cut(u, a.to)) continue;
            const Dist nd = extend(d, a.cost);
            if (dist_less(nd, dist[a.to])) {
                dist[a.to] = nd;
                pq.emplace(nd, a.to);
            }
        }
    }
    return dist;
}

/// Cheapest (then lexicographically smallest) path from `from` to `to`.
std::optional<std::vector<std::uint32_t>> best_route(const SimpleGraph& g, std::uint32_t from,
                                                     std::uint32_t to,
                                                     const std::vector<char>& removed,
                                                     const std::vector<std::uint32_t>& cut_to) {
    const auto dist = distances(g, to, removed, from, cut_to);
    if (!dist[from].finite()) {
        return std::nullopt;
    }
    std::vector<std::uint32_t> route{from};
    std::vector<char> on_route(g.adj.size(), 0);
    on_route[from] = 1;
    std::uint32_t cur = from;
    while (cur != to) {
        const bool at_start = cur == from;
        Dist best;
        for (const Arc& a : g.adj[cur]) {
            if (removed[a.to] || on_route[a.to] || !dist[a.to].finite()) continue;
            if (at_start && std::find(cut_to.begin(), cut_to.end(), a.to) != cut_to.end()) continue;
            const Dist via = extend(dist[a.to], a.cost);
            if (dist_less(via, best)) best = via;
        }
        std::optional<std::uint32_t> next;
        for (const Arc& a : g.adj[cur]) {
            if (removed[a.to] || on_route[a.to] || !dist[a.to].finite()) continue;
            if (at_start && std::find(cut_to.begin(), cut_to.end(), a.to) != cut_to.end()) continue;
            if (dist_equal(extend(dist[a.to], a.cost), best)) {
                next = a.to;  // arcs are sorted by position, so the first hit is smallest
                break;
            }
        }
        if (!next) {
            fail(ErrorCode::InvariantViolation, "shortest-path walk lost its route");
        }
        route.push_back(*next);
        on_route[*next] = 1;
        cur = *next;
    }
    return route;
}

PathResult path_from_positions(const SimpleGraph& g, const std::vector<std::uint32_t>& route) {
    const auto members = g.view->members();
    const KnowledgeGraph& graph = g.view->graph();
    PathResult p;
    p.nodes.reserve(route.size());
    for (std::uint32_t pos : route) {
        p.nodes.push_back(members[pos]);
    }
    for (std::size_t i = 0; i + 1 < route.size(); ++i) {
        const auto& arcs = g.adj[route[i]];
        auto it = std::lower_bound(arcs.begin(), arcs.end(), route[i + 1],
                                   [](const Arc& a, std::uint32_t v) { return a.to < v; });
        if (it == arcs.end() || it->to != route[i + 1]) {
            fail(ErrorCode::DiscontiguousPath, "route uses a missing edge");
        }
        p.edges.push_back(it->edge);
        p.totalCost += it->cost;
        const Edge& e = graph.edge(it->edge);
        p.pathProbability *= e.risk ? e.risk->pExploit : 0.0;
    }
    p.hopCount = p.edges.size();
    return p;
}

std::uint32_t require_member(const GraphView& view, NodeIndex n) {
    if (!view.graph().contains(n)) {
        fail(ErrorCode::UnknownNode, fmt::format("node index {} not in graph", n.value));
    }
    auto pos = view.member_position(n);
    if (!pos) {
        fail(ErrorCode::UnknownNode,
             "'" + view.graph().node(n).id + "' is not a Product and cannot be routed");
    }
    return static_cast<std::uint32_t>(*pos);
}

}  // namespace

std::string_view to_string(WeightPolicy p) noexcept { return kPolicyNames[static_cast<int>(p)]; }

std::optional<WeightPolicy> parse_weight_policy(std::string_view text) noexcept {
    for (std::size_t i = 0; i < std::size(kPolicyNames); ++i) {
        if (kPolicyNames[i] == text) return static_cast<WeightPolicy>(i);
    }
    return std::nullopt;
}

double edge_cost(const Edge& edge, WeightPolicy policy) {
    if (policy == WeightPolicy::Hop) {
        return 1.0;
    }
    if (!edge.risk) {
        fail(ErrorCode::InvariantViolation, "weighted routing over an edge without risk attributes");
    }
    if (policy == WeightPolicy::RiskCost) {
        return std::max(0.0, edge.risk->riskWeight);
    }
    return -std::log(std::max(edge.risk->pExploit, kMinLikelihood));
}

bool costs_equal(double a, double b) noexcept {
    if (a == b) return true;
    if (!std::isfinite(a) || !std::isfinite(b)) return false;
    return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

bool path_less(const PathResult& a, const PathResult& b) noexcept {
    if (!costs_equal(a.totalCost, b.totalCost)) return a.totalCost < b.totalCost;
    if (a.hopCount != b.hopCount) return a.hopCount < b.hopCount;
    return a.nodes < b.nodes;
}

std::optional<EdgeIndex> best_edge(const GraphView& view, NodeIndex a, NodeIndex b,
                                   WeightPolicy policy) {
    std::optional<EdgeIndex> best;
    double best_cost = 0.0;
    const KnowledgeGraph& graph = view.graph();
    for (const Adjacent& adj : view.adjacent(a)) {
        if (adj.node != b) continue;
        const double c = edge_cost(graph.edge(adj.edge), policy);
        if (!best || better_parallel(graph.edge(adj.edge), c, adj.edge, graph.edge(*best),
                                     best_cost, *best)) {
            best = adj.edge;
            best_cost = c;
        }
    }
    return best;
}

PathResult make_path(const GraphView& view, std::vector<NodeIndex> nodes, WeightPolicy policy) {
    PathResult p;
    const KnowledgeGraph& graph = view.graph();
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        auto e = best_edge(view, nodes[i], nodes[i + 1], policy);
        if (!e) {
            fail(ErrorCode::DiscontiguousPath,
                 fmt::format("'{}' and '{}' are not adjacent", graph.node(nodes[i]).id,
                             graph.node(nodes[i + 1]).id));
        }
        const Edge& edge = graph.edge(*e);
        p.edges.push_back(*e);
        p.totalCost += edge_cost(edge, policy);
        p.pathProbability *= edge.risk ? edge.risk->pExploit : 0.0;
    }
    p.nodes = std::move(nodes);
    p.hopCount = p.edges.size();
    return p;
}

std::optional<PathResult> dijkstra(const GraphView& view, NodeIndex src, NodeIndex dst,
                                   WeightPolicy policy) {
    const auto s = require_member(view, src);
    const auto t = require_member(view, dst);
    const SimpleGraph g = build_simple(view, policy);
    const std::vector<char> removed(g.adj.size(), 0);
    auto route = best_route(g, s, t, removed, {});
    if (!route) {
        return std::nullopt;
    }
    return path_from_positions(g, *route);
}

std::vector<PathResult> yen_k_shortest(const GraphView& view, NodeIndex src, NodeIndex dst,
                                       std::size_t k, WeightPolicy policy) {
    const auto s = require_member(view, src);
    const auto t = require_member(view, dst);
    if (s == t) {
        fail(ErrorCode::BadValue, "yen_k_shortest needs distinct endpoints");
    }
    std::vector<PathResult> found;
    if (k == 0) {
        return found;
    }
    const SimpleGraph g = build_simple(view, policy);
    std::vector<char> removed(g.adj.size(), 0);
    auto first = best_route(g, s, t, removed, {});
    if (!first) {
        return found;
    }
    std::vector<std::vector<std::uint32_t>> routes{*first};
    found.push_back(path_from_positions(g, *first));

    struct Candidate {
        PathResult path;
        std::vector<std::uint32_t> route;
    };
    const auto cand_less = [](const Candidate& a, const Candidate& b) {
        return path_less(a.path, b.path);
    };
    std::set<Candidate, decltype(cand_less)> pool(cand_less);
    std::set<std::vector<std::uint32_t>> accepted{*first};

    while (found.size() < k) {
        const std::vector<std::uint32_t> prev = routes.back();
        for (std::size_t j = 0; j + 1 < prev.size(); ++j) {
            const std::uint32_t spur = prev[j];
            std::vector<std::uint32_t> cut_to;
            for (const auto& r : routes) {
                if (r.size() > j + 1 && std::equal(r.begin(), r.begin() + j + 1, prev.begin())) {
                    cut_to.push_back(r[j + 1]);
                }
            }
            std::fill(removed.begin(), removed.end(), 0);
            for (std::size_t i = 0; i < j; ++i) {
                removed[prev[i]] = 1;
            }
            auto spur_route = best_route(g, spur, t, removed, cut_to);
            if (!spur_route) continue;
            std::vector<std::uint32_t> total(prev.begin(), prev.begin() + j);
            total.insert(total.end(), spur_route->begin(), spur_route->end());
            if (accepted.count(total)) continue;
            pool.insert(Candidate{path_from_positions(g, total), std::move(total)});
        }
        if (pool.empty()) break;
        auto best = pool.begin();
        Candidate next = *best;
        pool.erase(best);
        accepted.insert(next.route);
        routes.push_back(std::move(next.route));
        found.push_back(std::move(next.path));
    }
    return found;
}

std::vector<std::optional<std::size_t>> bfs_hops(const GraphView& view, NodeIndex src) {
    const auto s = require_member(view, src);
    const auto members = view.members();
    std::vector<std::optional<std::size_t>> hops(members.size());
    std::deque<std::uint32_t> queue{s};
    hops[s] = 0;
    while (!queue.empty()) {
        const auto u = queue.front();
        queue.pop_front();
        for (const Adjacent& a : view.adjacent(members[u])) {
            auto pos = view.member_position(a.node);
            if (pos && !hops[*pos]) {
                hops[*pos] = *hops[u] + 1;
                queue.push_back(static_cast<std::uint32_t>(*pos));
            }
        }
    }
    return hops;
}

// ---------------------------------------------------------------------------
// Betweenness

std::vector<double> betweenness(const GraphView& view, bool weighted) {
    const std::size_t n = view.members().size();
    if (n == 0) {
        fail(ErrorCode::EmptyGraph, "betweenness over an empty view");
    }
    const SimpleGraph g = build_simple(view, weighted ? WeightPolicy::RiskCost : WeightPolicy::Hop);
    std::vector<double> score(n, 0.0);
    std::vector<Dist> dist(n);
    std::vector<double> sigma(n);
    std::vector<double> delta(n);
    std::vector<std::vector<std::uint32_t>> preds(n);
    std::vector<char> done(n);
    std::vector<std::uint32_t> order;
    using Item = std::pair<Dist, std::uint32_t>;
    const auto cmp = [](const Item& a, const Item& b) {
        if (dist_equal(a.first, b.first)) return a.second > b.second;
        return dist_less(b.first, a.first);
    };
    for (std::uint32_t s = 0; s < n; ++s) {
        std::fill(dist.begin(), dist.end(), Dist{});
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        std::fill(done.begin(), done.end(), 0);
        for (auto& p : preds) p.clear();
        order.clear();
        std::priority_queue<Item, std::vector<Item>, decltype(cmp)> pq(cmp);
        dist[s] = Dist{0.0, 0};
        sigma[s] = 1.0;
        pq.emplace(dist[s], s);
        while (!pq.empty()) {
            const auto [d, u] = pq.top();
            pq.pop();
            if (done[u]) continue;
            done[u] = 1;
            order.push_back(u);
            for (const Arc& a : g.adj[u]) {
                if (done[a.to]) continue;
                const Dist nd = extend(dist[u], a.cost);
                if (dist_less(nd, dist[a.to])) {
                    dist[a.to] = nd;
                    sigma[a.to] = sigma[u];
                    preds[a.to].assign(1, u);
                    pq.emplace(nd, a.to);
                } else if (dist_equal(nd, dist[a.to])) {
                    sigma[a.to] += sigma[u];
                    preds[a.to].push_back(u);
                }
            }
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const auto w = *it;
            for (auto v : preds[w]) {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if (w != s) score[w] += delta[w];
        }
    }
    for (double& x : score) {
        x /= 2.0;
    }
    return score;
}

}  // namespace otkg
