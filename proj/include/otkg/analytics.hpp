#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "otkg/graph.hpp"

namespace otkg {

enum class WeightPolicy : std::uint8_t { Hop, RiskCost, MaxLikelihood };
std::string_view to_string(WeightPolicy p) noexcept;
std::optional<WeightPolicy> parse_weight_policy(std::string_view text) noexcept;

inline constexpr double kMinLikelihood = 1e-9;

/// Hop: 1. RiskCost: riskWeight. MaxLikelihood: -ln(max(pExploit, 1e-9)).
double edge_cost(const Edge& edge, WeightPolicy policy);

/// Path cost comparison: costs within 1e-9 (relative) are equal, then fewer
/// hops wins. Zero-cost edges therefore never produce ties between a path and
/// its extension.
bool costs_equal(double a, double b) noexcept;

struct PathResult {
    std::vector<NodeIndex> nodes;
    std::vector<EdgeIndex> edges;
    std::size_t hopCount = 0;
    double pathProbability = 1.0;
    double totalCost = 0.0;
};

/// Strict order used by every path routine: cost, hops, node sequence.
bool path_less(const PathResult& a, const PathResult& b) noexcept;

/// Between two adjacent nodes the cheapest active edge is used (ties: higher
/// pExploit, then lower edge index).
std::optional<EdgeIndex> best_edge(const GraphView& view, NodeIndex a, NodeIndex b,
                                   WeightPolicy policy);

/// Builds a PathResult (edges, cost, probability) for a node sequence.
/// Throws DiscontiguousPath when consecutive nodes are not adjacent.
PathResult make_path(const GraphView& view, std::vector<NodeIndex> nodes, WeightPolicy policy);

/// Cheapest path under path_less; nullopt when dst is unreachable.
std::optional<PathResult> dijkstra(const GraphView& view, NodeIndex src, NodeIndex dst,
                                   WeightPolicy policy);

/// Up to k loopless paths in path_less order. Empty when no route exists.
std::vector<PathResult> yen_k_shortest(const GraphView& view, NodeIndex src, NodeIndex dst,
                                       std::size_t k, WeightPolicy policy);

/// Hop distances from `src` to every member (nullopt when unreachable).
std::vector<std::optional<std::size_t>> bfs_hops(const GraphView& view, NodeIndex src);

// ---------------------------------------------------------------------------
// Centrality and communities. Scores are indexed by member position.

/// Random walk over the undirected view; each active edge contributes weight 1
/// (or its riskWeight when weighted). Dangling mass is spread uniformly and the
/// scores sum to 1. Throws EmptyGraph.
std::vector<double> pagerank(const GraphView& view, double damping = 0.85, double tol = 1e-8,
                             bool weighted = false);

/// Unnormalized pair-count betweenness; each unordered pair counts once.
/// Weighted mode uses riskWeight costs with the path_less tie rule.
std::vector<double> betweenness(const GraphView& view, bool weighted = false);

struct Community {
    std::size_t id = 0;
    std::vector<NodeIndex> members;
    double aggregateRisk = 0.0;  // Σ exposure over members
    bool cascade = false;
};

struct CommunityReport {
    std::vector<Community> communities;
    /// Community id per member position.
    std::vector<std::size_t> assignment;
    double modularity = 0.0;
    /// Modularity after each aggregation level, starting with the singleton partition.
    std::vector<double> modularityTrace;
};

/// Modularity of a partition given by community labels per member position.
double modularity(const GraphView& view, const std::vector<std::size_t>& labels, bool weighted);

/// Communities are numbered by their smallest member. cascade marks a community
/// holding an internal cross-zone edge with pExploit > 0.5.
CommunityReport louvain(const GraphView& view, bool weighted, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Reports

struct InterproductRow {
    std::string source;
    std::string target;
    double risk = 0.0;
    double exploitProb = 0.0;
    double attackCost = 0.0;
};
/// Sorted by risk desc, attackCost desc, then (source, target).
std::vector<InterproductRow> rank_interproduct_risk(const GraphView& view, std::size_t top_n);

struct ResidualRow {
    std::string product;
    std::string zone;
    double raw = 0.0;
    double enriched = 0.0;
    double after = 0.0;
    double delta = 0.0;
    long reductionPct = 100;
};
/// One row per product, by raw exposure desc then id.
std::vector<ResidualRow> residual_risk_report(const GraphView& original, const GraphView& enriched,
                                              const GraphView& controlled);

inline constexpr std::string_view kInterproductColumns =
    "source,target,risk,exploitProb,attackCost";
inline constexpr std::string_view kResidualColumns =
    "product,zone,raw,enriched,after,delta,reductionPct";
inline constexpr std::string_view kCommunityColumns = "community,size,aggregateRisk,cascade,members";

/// Shortest round-trip decimal form; stable across runs.
std::string format_number(double v);

void write_interproduct_csv(std::ostream& out, const std::vector<InterproductRow>& rows);
void write_residual_csv(std::ostream& out, const std::vector<ResidualRow>& rows);
void write_community_csv(std::ostream& out, const GraphView& view, const CommunityReport& report);
nlohmann::json to_json(const std::vector<InterproductRow>& rows);
nlohmann::json to_json(const std::vector<ResidualRow>& rows);
nlohmann::json to_json(const GraphView& view, const CommunityReport& report);

}  // namespace otkg
