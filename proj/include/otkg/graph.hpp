#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace otkg {

enum class NodeKind : std::uint8_t {
    Product,
    Vulnerability,
    Weakness,
    AttackPattern,
    Technique,
    Tactic,
    Asset,
    Mitigation,
    Zone,
    Protocol,
    Entity,
    Account,
    Software,
    Component,
    ProcessVariable,
    Observation,
};

enum class EdgeKind : std::uint8_t {
    CommunicatesWith,
    ControlledCommunicatesWith,
    HasPossibleCommunication,
    HasVulnerability,
    HasCwe,
    HasPossibleCwe,
    HasCapec,
    HasTechnique,
    HasPossibleTechnique,
    SuggestedTactic,
    MitigatedBy,
    InZone,
    UsesProtocol,
};

enum class Configuration : std::uint8_t { Original, Enriched, Controlled };

std::string_view to_string(NodeKind kind) noexcept;
std::string_view to_string(EdgeKind kind) noexcept;
std::string_view to_string(Configuration config) noexcept;
std::optional<NodeKind> parse_node_kind(std::string_view text) noexcept;
std::optional<EdgeKind> parse_edge_kind(std::string_view text) noexcept;
std::optional<Configuration> parse_configuration(std::string_view text) noexcept;

inline constexpr Configuration kAllConfigurations[] = {
    Configuration::Original, Configuration::Enriched, Configuration::Controlled};

/// Product-to-Product relations that carry risk attributes.
constexpr bool is_communication(EdgeKind kind) noexcept {
    return kind == EdgeKind::CommunicatesWith || kind == EdgeKind::ControlledCommunicatesWith ||
           kind == EdgeKind::HasPossibleCommunication;
}

using Properties = std::map<std::string, std::string>;

struct RiskAttributes {
    double controlStrength = 0.0;
    double pExploit = 0.0;
    double attackCost = 0.0;
    double riskWeight = 0.0;

    bool operator==(const RiskAttributes&) const = default;
};

/// Dense node handle. After `finalize()` handles are ordered like the external ids,
/// so comparing handles is comparing ids.
struct NodeIndex {
    std::uint32_t value = 0;
    auto operator<=>(const NodeIndex&) const = default;
};

using EdgeIndex = std::size_t;

struct Node {
    std::string id;
    NodeKind kind = NodeKind::Entity;
    std::string name;
    Properties props;
    int criticality = 0;
    std::optional<std::string> zone;

    bool operator==(const Node&) const = default;
};

struct Edge {
    NodeIndex src;
    NodeIndex dst;
    EdgeKind kind = EdgeKind::CommunicatesWith;
    std::optional<RiskAttributes> risk;
    Properties props;
};

/// Typed property graph. Nodes and edges are added during a single-writer build
/// phase; `finalize()` renumbers nodes by id and sorts edges so that every later
/// read (views, analytics, exports) is deterministic. Adding a node afterwards
/// clears the finalized flag; adding edges or setting risk attributes does not.
class KnowledgeGraph {
public:
    NodeIndex upsert_node(Node node);

    /// Inserts or merges on (src, dst, kind); a duplicate replaces risk and props.
    EdgeIndex upsert_edge(Edge edge);
    EdgeIndex upsert_edge(std::string_view src, std::string_view dst, EdgeKind kind,
                          std::optional<RiskAttributes> risk = std::nullopt, Properties props = {});

    void set_risk(EdgeIndex edge, const RiskAttributes& risk);

    void finalize();
    bool finalized() const noexcept { return finalized_; }
    std::uint64_t revision() const noexcept { return revision_; }

    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }

    const Node& node(NodeIndex n) const;
    const Edge& edge(EdgeIndex e) const;
    std::span<const Node> nodes() const noexcept { return nodes_; }
    std::span<const Edge> edges() const noexcept { return edges_; }

    std::optional<NodeIndex> find(std::string_view id) const;
    NodeIndex require(std::string_view id) const;
    std::optional<EdgeIndex> find_edge(NodeIndex src, NodeIndex dst, EdgeKind kind) const;

    std::vector<NodeIndex> nodes_of_kind(NodeKind kind) const;
    /// Outgoing edges of `n` with the given kind, in edge order.
    std::vector<EdgeIndex> out_edges(NodeIndex n, EdgeKind kind) const;

    bool contains(NodeIndex n) const noexcept { return n.value < nodes_.size(); }

private:
    struct EdgeKey {
        std::uint32_t src;
        std::uint32_t dst;
        EdgeKind kind;
        bool operator==(const EdgeKey&) const = default;
    };
    struct EdgeKeyHash {
        std::size_t operator()(const EdgeKey& k) const noexcept;
    };

    void check_edge_constraints(const Edge& edge) const;
    void rebuild_indices();

    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    std::unordered_map<std::string, std::uint32_t> by_id_;
    std::unordered_map<EdgeKey, EdgeIndex, EdgeKeyHash> by_key_;
    bool finalized_ = false;
    std::uint64_t revision_ = 0;
};

/// Whether an edge of `kind` may connect a `src` node to a `dst` node.
bool edge_kinds_compatible(EdgeKind kind, NodeKind src, NodeKind dst) noexcept;

struct Adjacent {
    NodeIndex node;
    EdgeIndex edge;
};

/// Configuration-filtered, read-only projection of a finalized graph.
/// Communication edges are traversed as undirected; storage keeps direction.
/// The member set is every Product node, so isolated products stay visible to
/// analytics. A view is a value and may be copied across threads.
class GraphView {
public:
    Configuration config() const noexcept { return config_; }
    const KnowledgeGraph& graph() const noexcept { return *graph_; }
    double prune_threshold() const noexcept { return prune_threshold_; }

    std::span<const EdgeIndex> active_edges() const noexcept { return active_; }
    std::span<const NodeIndex> members() const noexcept { return members_; }
    /// Undirected incidence of `n`, sorted by (neighbor, edge).
    std::span<const Adjacent> adjacent(NodeIndex n) const;
    bool is_active(EdgeIndex e) const;
    /// Position of `n` in members(), if it is a member.
    std::optional<std::size_t> member_position(NodeIndex n) const;
    /// True when the underlying graph changed after this view was projected.
    bool stale() const noexcept { return graph_->revision() != revision_; }

private:
    friend GraphView project_view(const KnowledgeGraph&, Configuration, double);

    const KnowledgeGraph* graph_ = nullptr;
    Configuration config_ = Configuration::Original;
    double prune_threshold_ = 0.05;
    std::uint64_t revision_ = 0;
    std::vector<EdgeIndex> active_;
    std::vector<NodeIndex> members_;
    std::vector<std::uint32_t> member_pos_;
    std::vector<std::size_t> adj_offsets_;
    std::vector<Adjacent> adj_;
    std::vector<bool> active_mask_;
};

inline constexpr double kDefaultPruneThreshold = 0.05;

/// Original: COMMUNICATES_WITH. Enriched: Original plus HAS_POSSIBLE_COMMUNICATION.
/// Controlled: CONTROLLED_COMMUNICATES_WITH edges with riskWeight >= threshold.
GraphView project_view(const KnowledgeGraph& graph, Configuration config,
                       double prune_threshold = kDefaultPruneThreshold);

std::vector<Adjacent> neighbors(const GraphView& view, NodeIndex n);

enum class ExportFormat { Dot, GraphMl, EdgeCsv };
std::optional<ExportFormat> parse_export_format(std::string_view text) noexcept;

inline constexpr std::string_view kEdgeCsvHeader =
    "src,dst,kind,riskWeight,pExploit,attackCost,controlStrength,protocol";
inline constexpr std::string_view kNodeCsvHeader = "id,kind,name,zone,criticality,props_json";

/// Nodes by id, edges by (src, dst, kind). Output is byte-stable for equal input.
void export_view(const GraphView& view, ExportFormat format, std::ostream& out);
void export_view(const GraphView& view, ExportFormat format, const std::string& path);
/// All nodes in node.csv form (the ingestion node format).
void write_node_csv(const KnowledgeGraph& graph, std::ostream& out);

struct KindCount {
    std::map<std::string, std::size_t> nodes;
    std::map<std::string, std::size_t> edges;
};
KindCount count_by_kind(const KnowledgeGraph& graph);

/// Every stored communication edge carries risk attributes.
bool all_communication_edges_annotated(const KnowledgeGraph& graph);

}  // namespace otkg
