#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "otkg/graph.hpp"

namespace otkg {

struct FastRpOptions {
    std::size_t dim = 128;
    std::vector<double> iterationWeights{0.0, 1.0, 1.0};
    std::uint64_t seed = 42;
    /// Also propagate over taxonomy, zone and protocol edges, so products that
    /// share CVEs, zones or protocols end up close.
    bool includeTaxonomy = true;
};

/// One row per graph node (node-index order).
struct EmbeddingMatrix {
    std::size_t dim = 0;
    std::uint64_t seed = 0;
    std::vector<double> iterationWeights;
    std::vector<double> values;  // row-major, node_count × dim

    std::size_t rows() const noexcept { return dim == 0 ? 0 : values.size() / dim; }
    std::span<const double> row(NodeIndex n) const;
};

/// state0 is a very sparse ±1 projection (density 1/√dim); state i is the
/// degree-normalized neighbor average of state i−1. Each state is L2-normalized
/// per row and the result is Σ weight_i · state_i. Throws EmptyGraph.
EmbeddingMatrix fastrp_embed(const GraphView& view, const FastRpOptions& options = {});

double cosine_similarity(std::span<const double> a, std::span<const double> b) noexcept;

struct PossibleLink {
    NodeIndex src;
    NodeIndex dst;
    double similarity = 0.0;
};

/// For each Product in id order, its top_k most similar other Products by
/// cosine similarity (ties by id), skipping pairs already joined by
/// COMMUNICATES_WITH in either direction, pairs already proposed in the other
/// direction, and non-positive similarities.
std::vector<PossibleLink> knn_possible_links(const EmbeddingMatrix& embedding,
                                             const GraphView& view, std::size_t top_k = 5);

/// Stores the links as HAS_POSSIBLE_COMMUNICATION edges (similarity in props).
std::size_t add_possible_links(KnowledgeGraph& graph, std::span<const PossibleLink> links);

/// CSV: id, e0 .. e{dim-1}.
void write_embedding_csv(std::ostream& out, const KnowledgeGraph& graph,
                         const EmbeddingMatrix& embedding);

}  // namespace otkg
