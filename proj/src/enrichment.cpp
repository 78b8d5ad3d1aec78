#include "otkg/enrichment.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include <fmt/format.h>

#include "otkg/analytics.hpp"
#include "otkg/csv.hpp"
#include "otkg/error.hpp"

namespace otkg {

namespace {

std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double unit(std::uint64_t seed, std::uint64_t row, std::uint64_t col) {
    const std::uint64_t h = mix(mix(mix(seed) ^ row) ^ col);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

void normalize_rows(std::vector<double>& m, std::size_t dim) {
    for (std::size_t r = 0; r * dim < m.size(); ++r) {
        double norm = 0.0;
        for (std::size_t j = 0; j < dim; ++j) norm += m[r * dim + j] * m[r * dim + j];
        if (norm > 0.0) {
            norm = std::sqrt(norm);
            for (std::size_t j = 0; j < dim; ++j) m[r * dim + j] /= norm;
        }
    }
}

}  // namespace

std::span<const double> EmbeddingMatrix::row(NodeIndex n) const {
    if (static_cast<std::size_t>(n.value) >= rows()) {
        fail(ErrorCode::UnknownNode, fmt::format("node index {} has no embedding", n.value));
    }
    return std::span<const double>(values.data() + n.value * dim, dim);
}

EmbeddingMatrix fastrp_embed(const GraphView& view, const FastRpOptions& options) {
    const KnowledgeGraph& graph = view.graph();
    const std::size_t n = graph.node_count();
    if (n == 0 || view.members().empty()) {
        fail(ErrorCode::EmptyGraph, "fastrp_embed over an empty view");
    }
    if (options.dim == 0 || options.iterationWeights.empty()) {
        fail(ErrorCode::InvalidConfig, "fastrp needs dim >= 1 and at least one iteration weight");
    }
    const std::size_t dim = options.dim;

    std::vector<std::vector<std::uint32_t>> adj(n);
    const auto link = [&](const Edge& e) {
        adj[e.src.value].push_back(e.dst.value);
        adj[e.dst.value].push_back(e.src.value);
    };
    for (EdgeIndex e : view.active_edges()) link(graph.edge(e));
    if (options.includeTaxonomy) {
        for (const Edge& e : graph.edges()) {
            if (!is_communication(e.kind)) link(e);
        }
    }

    const double density = 1.0 / std::sqrt(static_cast<double>(dim));
    std::vector<double> state(n * dim, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t j = 0; j < dim; ++j) {
            const double u = unit(options.seed, r, j);
            state[r * dim + j] = u < density / 2 ? 1.0 : (u < density ? -1.0 : 0.0);
        }
    }
    normalize_rows(state, dim);

    EmbeddingMatrix out;
    out.dim = dim;
    out.seed = options.seed;
    out.iterationWeights = options.iterationWeights;
    out.values.assign(n * dim, 0.0);
    const auto accumulate = [&](double w) {
        if (w == 0.0) return;
        for (std::size_t i = 0; i < state.size(); ++i) out.values[i] += w * state[i];
    };
    accumulate(options.iterationWeights[0]);

    std::vector<double> next(n * dim);
    for (std::size_t it = 1; it < options.iterationWeights.size(); ++it) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t r = 0; r < n; ++r) {
            if (adj[r].empty()) continue;
            const double inv = 1.0 / static_cast<double>(adj[r].size());
            for (std::uint32_t nb : adj[r]) {
                for (std::size_t j = 0; j < dim; ++j) next[r * dim + j] += inv * state[nb * dim + j];
            }
        }
        normalize_rows(next, dim);
        state.swap(next);
        accumulate(options.iterationWeights[it]);
    }
    return out;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) noexcept {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<PossibleLink> knn_possible_links(const EmbeddingMatrix& embedding,
                                             const GraphView& view, std::size_t top_k) {
    const KnowledgeGraph& graph = view.graph();
    const auto products = view.members();
    std::set<std::pair<std::uint32_t, std::uint32_t>> linked;
    for (const Edge& e : graph.edges()) {
        if (e.kind == EdgeKind::CommunicatesWith) {
            linked.emplace(std::min(e.src.value, e.dst.value), std::max(e.src.value, e.dst.value));
        }
    }
    std::set<std::pair<std::uint32_t, std::uint32_t>> proposed;
    std::vector<PossibleLink> out;
    for (NodeIndex p : products) {
        std::vector<std::pair<double, NodeIndex>> scored;
        for (NodeIndex q : products) {
            if (q == p) continue;
            const auto key = std::pair{std::min(p.value, q.value), std::max(p.value, q.value)};
            if (linked.count(key)) continue;
            const double sim = cosine_similarity(embedding.row(p), embedding.row(q));
            if (sim > 0.0) scored.emplace_back(sim, q);
        }
        std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        for (std::size_t i = 0; i < scored.size() && i < top_k; ++i) {
            const NodeIndex q = scored[i].second;
            const auto key = std::pair{std::min(p.value, q.value), std::max(p.value, q.value)};
            if (!proposed.insert(key).second) continue;
            out.push_back(PossibleLink{p, q, scored[i].first});
        }
    }
    return out;
}

std::size_t add_possible_links(KnowledgeGraph& graph, std::span<const PossibleLink> links) {
    for (const auto& l : links) {
        graph.upsert_edge(Edge{l.src, l.dst, EdgeKind::HasPossibleCommunication, std::nullopt,
                               Properties{{"similarity", format_number(l.similarity)}}});
    }
    return links.size();
}

void write_embedding_csv(std::ostream& out, const KnowledgeGraph& graph,
                         const EmbeddingMatrix& embedding) {
    std::vector<std::string> row{"id"};
    for (std::size_t j = 0; j < embedding.dim; ++j) row.push_back(fmt::format("e{}", j));
    csv::write_row(out, row);
    for (std::uint32_t i = 0; i < embedding.rows(); ++i) {
        row.assign(1, graph.node(NodeIndex{i}).id);
        for (double v : embedding.row(NodeIndex{i})) row.push_back(format_number(v));
        csv::write_row(out, row);
    }
}

}  // namespace otkg
