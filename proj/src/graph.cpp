#include "otkg/graph.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <ostream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "otkg/csv.hpp"
#include "otkg/error.hpp"

namespace otkg {

namespace {

constexpr std::string_view kNodeKindNames[] = {
    "Product", "Vulnerability", "Weakness", "AttackPattern", "Technique",  "Tactic",
    "Asset",   "Mitigation",    "Zone",     "Protocol",      "Entity",     "Account",
    "Software", "Component",    "ProcessVariable", "Observation"};

constexpr std::string_view kEdgeKindNames[] = {
    "COMMUNICATES_WITH", "CONTROLLED_COMMUNICATES_WITH", "HAS_POSSIBLE_COMMUNICATION",
    "HAS_VULNERABILITY", "HAS_CWE",     "HAS_POSSIBLE_CWE",
    "HAS_CAPEC",         "HAS_TECHNIQUE", "HAS_POSSIBLE_TECHNIQUE",
    "SUGGESTED_TACTIC",  "MITIGATED_BY", "IN_ZONE",
    "USES_PROTOCOL"};

constexpr std::string_view kConfigurationNames[] = {"Original", "Enriched", "Controlled"};

template <typename Enum, std::size_t N>
std::optional<Enum> parse_named(std::string_view text, const std::string_view (&names)[N]) {
    for (std::size_t i = 0; i < N; ++i) {
        if (names[i] == text) {
            return static_cast<Enum>(i);
        }
    }
    return std::nullopt;
}

bool one_of(NodeKind kind, std::initializer_list<NodeKind> kinds) {
    return std::find(kinds.begin(), kinds.end(), kind) != kinds.end();
}

std::string number(double v) { return fmt::format("{}", v); }

std::string dot_quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out.push_back('\\');
        }
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string prop_or_empty(const Properties& props, const std::string& key) {
    auto it = props.find(key);
    return it == props.end() ? std::string{} : it->second;
}

}  // namespace

std::string_view to_string(NodeKind kind) noexcept {
    return kNodeKindNames[static_cast<std::size_t>(kind)];
}
std::string_view to_string(EdgeKind kind) noexcept {
    return kEdgeKindNames[static_cast<std::size_t>(kind)];
}
std::string_view to_string(Configuration config) noexcept {
    return kConfigurationNames[static_cast<std::size_t>(config)];
}
std::optional<NodeKind> parse_node_kind(std::string_view text) noexcept {
    return parse_named<NodeKind>(text, kNodeKindNames);
}
std::optional<EdgeKind> parse_edge_kind(std::string_view text) noexcept {
    return parse_named<EdgeKind>(text, kEdgeKindNames);
}
std::optional<Configuration> parse_configuration(std::string_view text) noexcept {
    if (auto c = parse_named<Configuration>(text, kConfigurationNames)) {
        return c;
    }
    if (text == "original") return Configuration::Original;
    if (text == "enriched") return Configuration::Enriched;
    if (text == "controlled") return Configuration::Controlled;
    return std::nullopt;
}

bool edge_kinds_compatible(EdgeKind kind, NodeKind src, NodeKind dst) noexcept {
    using K = NodeKind;
    switch (kind) {
        case EdgeKind::CommunicatesWith:
        case EdgeKind::ControlledCommunicatesWith:
        case EdgeKind::HasPossibleCommunication:
            return src == K::Product && dst == K::Product;
        case EdgeKind::HasVulnerability:
            return one_of(src, {K::Product, K::Software, K::Component}) && dst == K::Vulnerability;
        case EdgeKind::HasCwe:
        case EdgeKind::HasPossibleCwe:
            return src == K::Vulnerability && dst == K::Weakness;
        case EdgeKind::HasCapec:
            return src == K::Weakness && dst == K::AttackPattern;
        case EdgeKind::HasTechnique:
            return src == K::AttackPattern && dst == K::Technique;
        case EdgeKind::HasPossibleTechnique:
            return one_of(src, {K::Vulnerability, K::AttackPattern}) && dst == K::Technique;
        case EdgeKind::SuggestedTactic:
            return one_of(src, {K::Technique, K::Vulnerability}) && dst == K::Tactic;
        case EdgeKind::MitigatedBy:
            return one_of(src, {K::Product, K::Vulnerability, K::Weakness, K::AttackPattern,
                                K::Technique}) &&
                   dst == K::Mitigation;
        case EdgeKind::InZone:
            return one_of(src, {K::Product, K::Asset, K::Software, K::Component}) &&
                   dst == K::Zone;
        case EdgeKind::UsesProtocol:
            return one_of(src, {K::Product, K::Software, K::Component}) && dst == K::Protocol;
    }
    return false;
}

// ---------------------------------------------------------------------------
// KnowledgeGraph

std::size_t KnowledgeGraph::EdgeKeyHash::operator()(const EdgeKey& k) const noexcept {
    std::uint64_t h = (static_cast<std::uint64_t>(k.src) << 32) ^ k.dst;
    h ^= static_cast<std::uint64_t>(k.kind) * 0x9E3779B97F4A7C15ULL;
    h ^= h >> 29;
    return static_cast<std::size_t>(h * 0xBF58476D1CE4E5B9ULL);
}

NodeIndex KnowledgeGraph::upsert_node(Node node) {
    if (node.id.empty()) {
        fail(ErrorCode::InvalidNode, "node id must not be empty");
    }
    if (node.criticality < 0 || node.criticality > 10) {
        fail(ErrorCode::InvalidCriticality,
             fmt::format("node '{}' criticality {} outside [0,10]", node.id, node.criticality));
    }
    if (node.kind == NodeKind::Product && (!node.zone || node.zone->empty())) {
        fail(ErrorCode::InvalidNode, fmt::format("product '{}' has no zone", node.id));
    }
    if (auto it = by_id_.find(node.id); it != by_id_.end()) {
        Node& existing = nodes_[it->second];
        if (existing.kind != node.kind) {
            fail(ErrorCode::KindConflict,
                 fmt::format("node '{}' exists as {}, cannot re-upsert as {}", node.id,
                             to_string(existing.kind), to_string(node.kind)));
        }
        if (!(existing == node)) {
            existing = std::move(node);
            ++revision_;
        }
        return NodeIndex{it->second};
    }
    const auto index = static_cast<std::uint32_t>(nodes_.size());
    by_id_.emplace(node.id, index);
    nodes_.push_back(std::move(node));
    finalized_ = false;
    ++revision_;
    return NodeIndex{index};
}

void KnowledgeGraph::check_edge_constraints(const Edge& edge) const {
    if (!contains(edge.src) || !contains(edge.dst)) {
        fail(ErrorCode::MissingEndpoint, "edge endpoint does not exist");
    }
    const Node& s = nodes_[edge.src.value];
    const Node& d = nodes_[edge.dst.value];
    if (edge.src == edge.dst) {
        fail(ErrorCode::KindConstraintViolation,
             fmt::format("self-loop on '{}' ({})", s.id, to_string(edge.kind)));
    }
    if (!edge_kinds_compatible(edge.kind, s.kind, d.kind)) {
        fail(ErrorCode::KindConstraintViolation,
             fmt::format("{} cannot connect {} '{}' to {} '{}'", to_string(edge.kind),
                         to_string(s.kind), s.id, to_string(d.kind), d.id));
    }
    if (edge.risk && !is_communication(edge.kind)) {
        fail(ErrorCode::KindConstraintViolation,
             fmt::format("{} edges do not carry risk attributes", to_string(edge.kind)));
    }
}

EdgeIndex KnowledgeGraph::upsert_edge(Edge edge) {
    check_edge_constraints(edge);
    const EdgeKey key{edge.src.value, edge.dst.value, edge.kind};
    ++revision_;
    if (auto it = by_key_.find(key); it != by_key_.end()) {
        Edge& existing = edges_[it->second];
        existing.risk = edge.risk;
        existing.props = std::move(edge.props);
        return it->second;
    }
    const EdgeIndex index = edges_.size();
    by_key_.emplace(key, index);
    edges_.push_back(std::move(edge));
    return index;
}

EdgeIndex KnowledgeGraph::upsert_edge(std::string_view src, std::string_view dst, EdgeKind kind,
                                      std::optional<RiskAttributes> risk, Properties props) {
    auto s = find(src);
    auto d = find(dst);
    if (!s || !d) {
        fail(ErrorCode::MissingEndpoint,
             fmt::format("edge {} -> {} ({}): unknown endpoint '{}'", src, dst, to_string(kind),
                         s ? dst : src));
    }
    return upsert_edge(Edge{*s, *d, kind, risk, std::move(props)});
}

void KnowledgeGraph::set_risk(EdgeIndex e, const RiskAttributes& risk) {
    if (e >= edges_.size()) {
        fail(ErrorCode::InvariantViolation, "edge index out of range");
    }
    if (!is_communication(edges_[e].kind)) {
        fail(ErrorCode::KindConstraintViolation,
             fmt::format("{} edges do not carry risk attributes", to_string(edges_[e].kind)));
    }
    edges_[e].risk = risk;
    ++revision_;
}

void KnowledgeGraph::finalize() {
    std::vector<std::uint32_t> order(nodes_.size());
    std::iota(order.begin(), order.end(), 0U);
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) { return nodes_[a].id < nodes_[b].id; });
    std::vector<std::uint32_t> remap(nodes_.size());
    std::vector<Node> sorted_nodes;
    sorted_nodes.reserve(nodes_.size());
    for (std::uint32_t rank = 0; rank < order.size(); ++rank) {
        remap[order[rank]] = rank;
        sorted_nodes.push_back(std::move(nodes_[order[rank]]));
    }
    nodes_ = std::move(sorted_nodes);
    for (Edge& e : edges_) {
        e.src.value = remap[e.src.value];
        e.dst.value = remap[e.dst.value];
    }
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
        return std::tie(a.src, a.dst, a.kind) < std::tie(b.src, b.dst, b.kind);
    });
    rebuild_indices();
    finalized_ = true;
    ++revision_;
}

void KnowledgeGraph::rebuild_indices() {
    by_id_.clear();
    for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
        by_id_.emplace(nodes_[i].id, i);
    }
    by_key_.clear();
    for (EdgeIndex i = 0; i < edges_.size(); ++i) {
        by_key_.emplace(EdgeKey{edges_[i].src.value, edges_[i].dst.value, edges_[i].kind}, i);
    }
}

const Node& KnowledgeGraph::node(NodeIndex n) const {
    if (!contains(n)) {
        fail(ErrorCode::UnknownNode, fmt::format("node index {} out of range", n.value));
    }
    return nodes_[n.value];
}

const Edge& KnowledgeGraph::edge(EdgeIndex e) const {
    if (e >= edges_.size()) {
        fail(ErrorCode::InvariantViolation, fmt::format("edge index {} out of range", e));
    }
    return edges_[e];
}

std::optional<NodeIndex> KnowledgeGraph::find(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    if (it == by_id_.end()) {
        return std::nullopt;
    }
    return NodeIndex{it->second};
}

NodeIndex KnowledgeGraph::require(std::string_view id) const {
    if (auto n = find(id)) {
        return *n;
    }
    fail(ErrorCode::UnknownNode, fmt::format("unknown node '{}'", id));
}

std::optional<EdgeIndex> KnowledgeGraph::find_edge(NodeIndex src, NodeIndex dst,
                                                   EdgeKind kind) const {
    auto it = by_key_.find(EdgeKey{src.value, dst.value, kind});
    if (it == by_key_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::vector<NodeIndex> KnowledgeGraph::nodes_of_kind(NodeKind kind) const {
    std::vector<NodeIndex> out;
    for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].kind == kind) {
            out.push_back(NodeIndex{i});
        }
    }
    return out;
}

std::vector<EdgeIndex> KnowledgeGraph::out_edges(NodeIndex n, EdgeKind kind) const {
    std::vector<EdgeIndex> out;
    for (EdgeIndex i = 0; i < edges_.size(); ++i) {
        if (edges_[i].src == n && edges_[i].kind == kind) {
            out.push_back(i);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Views

std::span<const Adjacent> GraphView::adjacent(NodeIndex n) const {
    if (n.value + 1 >= adj_offsets_.size()) {
        fail(ErrorCode::UnknownNode, fmt::format("node index {} not in view", n.value));
    }
    return std::span<const Adjacent>(adj_.data() + adj_offsets_[n.value],
                                     adj_offsets_[n.value + 1] - adj_offsets_[n.value]);
}

bool GraphView::is_active(EdgeIndex e) const {
    return e < active_mask_.size() && active_mask_[e];
}

std::optional<std::size_t> GraphView::member_position(NodeIndex n) const {
    if (n.value >= member_pos_.size() || member_pos_[n.value] == UINT32_MAX) {
        return std::nullopt;
    }
    return member_pos_[n.value];
}

GraphView project_view(const KnowledgeGraph& graph, Configuration config,
                       double prune_threshold) {
    if (!graph.finalized()) {
        fail(ErrorCode::GraphNotFinalized, "project_view requires a finalized graph");
    }
    GraphView view;
    view.graph_ = &graph;
    view.config_ = config;
    view.prune_threshold_ = prune_threshold;
    view.revision_ = graph.revision();

    const auto edges = graph.edges();
    view.active_mask_.assign(edges.size(), false);
    for (EdgeIndex i = 0; i < edges.size(); ++i) {
        const Edge& e = edges[i];
        bool active = false;
        switch (config) {
            case Configuration::Original:
                active = e.kind == EdgeKind::CommunicatesWith;
                break;
            case Configuration::Enriched:
                active = e.kind == EdgeKind::CommunicatesWith ||
                         e.kind == EdgeKind::HasPossibleCommunication;
                break;
            case Configuration::Controlled:
                active = e.kind == EdgeKind::ControlledCommunicatesWith && e.risk &&
                         e.risk->riskWeight >= prune_threshold;
                break;
        }
        if (active) {
            view.active_.push_back(i);
            view.active_mask_[i] = true;
        }
    }

    const std::size_t n = graph.node_count();
    view.member_pos_.assign(n, UINT32_MAX);
    for (std::uint32_t i = 0; i < n; ++i) {
        if (graph.nodes()[i].kind == NodeKind::Product) {
            view.member_pos_[i] = static_cast<std::uint32_t>(view.members_.size());
            view.members_.push_back(NodeIndex{i});
        }
    }

    std::vector<std::size_t> degree(n, 0);
    for (EdgeIndex e : view.active_) {
        ++degree[edges[e].src.value];
        ++degree[edges[e].dst.value];
    }
    view.adj_offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        view.adj_offsets_[i + 1] = view.adj_offsets_[i] + degree[i];
    }
    view.adj_.resize(view.adj_offsets_[n]);
    std::vector<std::size_t> fill(view.adj_offsets_.begin(), view.adj_offsets_.end() - 1);
    for (EdgeIndex e : view.active_) {
        const Edge& edge = edges[e];
        view.adj_[fill[edge.src.value]++] = Adjacent{edge.dst, e};
        view.adj_[fill[edge.dst.value]++] = Adjacent{edge.src, e};
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::sort(view.adj_.begin() + static_cast<std::ptrdiff_t>(view.adj_offsets_[i]),
                  view.adj_.begin() + static_cast<std::ptrdiff_t>(view.adj_offsets_[i + 1]),
                  [](const Adjacent& a, const Adjacent& b) {
                      return std::tie(a.node, a.edge) < std::tie(b.node, b.edge);
                  });
    }
    return view;
}

std::vector<Adjacent> neighbors(const GraphView& view, NodeIndex n) {
    if (!view.graph().contains(n)) {
        fail(ErrorCode::UnknownNode, fmt::format("node index {} does not exist", n.value));
    }
    auto adj = view.adjacent(n);
    return {adj.begin(), adj.end()};
}

// ---------------------------------------------------------------------------
// Export

std::optional<ExportFormat> parse_export_format(std::string_view text) noexcept {
    if (text == "dot") return ExportFormat::Dot;
    if (text == "graphml") return ExportFormat::GraphMl;
    if (text == "csv" || text == "edge-csv") return ExportFormat::EdgeCsv;
    return std::nullopt;
}

namespace {

std::vector<EdgeIndex> sorted_active(const GraphView& view) {
    const auto& g = view.graph();
    std::vector<EdgeIndex> edges(view.active_edges().begin(), view.active_edges().end());
    std::sort(edges.begin(), edges.end(), [&](EdgeIndex a, EdgeIndex b) {
        const Edge& ea = g.edge(a);
        const Edge& eb = g.edge(b);
        return std::tie(g.node(ea.src).id, g.node(ea.dst).id, ea.kind) <
               std::tie(g.node(eb.src).id, g.node(eb.dst).id, eb.kind);
    });
    return edges;
}

std::vector<NodeIndex> exported_nodes(const GraphView& view) {
    const auto& g = view.graph();
    std::vector<bool> keep(g.node_count(), false);
    for (NodeIndex m : view.members()) {
        keep[m.value] = true;
    }
    for (EdgeIndex e : view.active_edges()) {
        keep[g.edge(e).src.value] = true;
        keep[g.edge(e).dst.value] = true;
    }
    std::vector<NodeIndex> out;
    for (std::uint32_t i = 0; i < keep.size(); ++i) {
        if (keep[i]) {
            out.push_back(NodeIndex{i});
        }
    }
    // Finalized graphs already order indices by id.
    return out;
}

void export_dot(const GraphView& view, std::ostream& out) {
    const auto& g = view.graph();
    out << "digraph " << dot_quote(to_string(view.config())) << " {\n";
    for (NodeIndex n : exported_nodes(view)) {
        const Node& node = g.node(n);
        out << "  " << dot_quote(node.id) << " [kind=" << dot_quote(to_string(node.kind))
            << ", label=" << dot_quote(node.name.empty() ? node.id : node.name);
        if (node.zone) {
            out << ", zone=" << dot_quote(*node.zone);
        }
        out << "];\n";
    }
    for (EdgeIndex e : sorted_active(view)) {
        const Edge& edge = g.edge(e);
        out << "  " << dot_quote(g.node(edge.src).id) << " -> " << dot_quote(g.node(edge.dst).id)
            << " [kind=" << dot_quote(to_string(edge.kind));
        if (edge.risk) {
            out << ", riskWeight=" << number(edge.risk->riskWeight)
                << ", pExploit=" << number(edge.risk->pExploit);
        }
        out << "];\n";
    }
    out << "}\n";
}

void export_graphml(const GraphView& view, std::ostream& out) {
    const auto& g = view.graph();
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
           "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
           "  <key id=\"kind\" for=\"all\" attr.name=\"kind\" attr.type=\"string\"/>\n"
           "  <key id=\"name\" for=\"node\" attr.name=\"name\" attr.type=\"string\"/>\n"
           "  <key id=\"zone\" for=\"node\" attr.name=\"zone\" attr.type=\"string\"/>\n"
           "  <key id=\"criticality\" for=\"node\" attr.name=\"criticality\" "
           "attr.type=\"int\"/>\n"
           "  <key id=\"riskWeight\" for=\"edge\" attr.name=\"riskWeight\" "
           "attr.type=\"double\"/>\n"
           "  <key id=\"pExploit\" for=\"edge\" attr.name=\"pExploit\" attr.type=\"double\"/>\n"
           "  <key id=\"attackCost\" for=\"edge\" attr.name=\"attackCost\" "
           "attr.type=\"double\"/>\n"
           "  <key id=\"controlStrength\" for=\"edge\" attr.name=\"controlStrength\" "
           "attr.type=\"double\"/>\n"
           "  <key id=\"protocol\" for=\"edge\" attr.name=\"protocol\" attr.type=\"string\"/>\n";
    out << "  <graph id=\"" << to_string(view.config()) << "\" edgedefault=\"directed\">\n";
    for (NodeIndex n : exported_nodes(view)) {
        const Node& node = g.node(n);
        out << "    <node id=\"" << xml_escape(node.id) << "\">\n"
            << "      <data key=\"kind\">" << to_string(node.kind) << "</data>\n"
            << "      <data key=\"name\">" << xml_escape(node.name) << "</data>\n";
        if (node.zone) {
            out << "      <data key=\"zone\">" << xml_escape(*node.zone) << "</data>\n";
        }
        out << "      <data key=\"criticality\">" << node.criticality << "</data>\n"
            << "    </node>\n";
    }
    for (EdgeIndex e : sorted_active(view)) {
        const Edge& edge = g.edge(e);
        out << "    <edge source=\"" << xml_escape(g.node(edge.src).id) << "\" target=\""
            << xml_escape(g.node(edge.dst).id) << "\">\n"
            << "      <data key=\"kind\">" << to_string(edge.kind) << "</data>\n";
        if (edge.risk) {
            out << "      <data key=\"riskWeight\">" << number(edge.risk->riskWeight) << "</data>\n"
                << "      <data key=\"pExploit\">" << number(edge.risk->pExploit) << "</data>\n"
                << "      <data key=\"attackCost\">" << number(edge.risk->attackCost) << "</data>\n"
                << "      <data key=\"controlStrength\">" << number(edge.risk->controlStrength)
                << "</data>\n";
        }
        if (auto it = edge.props.find("protocol"); it != edge.props.end()) {
            out << "      <data key=\"protocol\">" << xml_escape(it->second) << "</data>\n";
        }
        out << "    </edge>\n";
    }
    out << "  </graph>\n</graphml>\n";
}

void export_edge_csv(const GraphView& view, std::ostream& out) {
    const auto& g = view.graph();
    out << kEdgeCsvHeader << '\n';
    for (EdgeIndex e : sorted_active(view)) {
        const Edge& edge = g.edge(e);
        std::vector<std::string> row{g.node(edge.src).id, g.node(edge.dst).id,
                                     std::string(to_string(edge.kind))};
        if (edge.risk) {
            row.push_back(number(edge.risk->riskWeight));
            row.push_back(number(edge.risk->pExploit));
            row.push_back(number(edge.risk->attackCost));
            row.push_back(number(edge.risk->controlStrength));
        } else {
            row.insert(row.end(), 4, std::string{});
        }
        row.push_back(prop_or_empty(edge.props, "protocol"));
        csv::write_row(out, row);
    }
}

}  // namespace

void export_view(const GraphView& view, ExportFormat format, std::ostream& out) {
    switch (format) {
        case ExportFormat::Dot: export_dot(view, out); break;
        case ExportFormat::GraphMl: export_graphml(view, out); break;
        case ExportFormat::EdgeCsv: export_edge_csv(view, out); break;
    }
    if (!out) {
        fail(ErrorCode::IoFailure, "failed writing graph export");
    }
}

void export_view(const GraphView& view, ExportFormat format, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        fail(ErrorCode::IoFailure, "cannot open '" + path + "' for writing");
    }
    export_view(view, format, out);
}

void write_node_csv(const KnowledgeGraph& graph, std::ostream& out) {
    out << kNodeCsvHeader << '\n';
    std::vector<std::uint32_t> order(graph.node_count());
    std::iota(order.begin(), order.end(), 0U);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return graph.nodes()[a].id < graph.nodes()[b].id;
    });
    for (std::uint32_t i : order) {
        const Node& n = graph.nodes()[i];
        nlohmann::json props = nlohmann::json::object();
        for (const auto& [k, v] : n.props) {
            props[k] = v;
        }
        csv::write_row(out, {n.id, std::string(to_string(n.kind)), n.name, n.zone.value_or(""),
                             std::to_string(n.criticality), props.dump()});
    }
    if (!out) {
        fail(ErrorCode::IoFailure, "failed writing node csv");
    }
}

KindCount count_by_kind(const KnowledgeGraph& graph) {
    KindCount counts;
    for (const Node& n : graph.nodes()) {
        ++counts.nodes[std::string(to_string(n.kind))];
    }
    for (const Edge& e : graph.edges()) {
        ++counts.edges[std::string(to_string(e.kind))];
    }
    return counts;
}

bool all_communication_edges_annotated(const KnowledgeGraph& graph) {
    return std::all_of(graph.edges().begin(), graph.edges().end(), [](const Edge& e) {
        return !is_communication(e.kind) || e.risk.has_value();
    });
}

}  // namespace otkg
