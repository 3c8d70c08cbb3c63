#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "adngcl/linalg.hpp"

namespace adngcl {

using NodeId = std::uint32_t;
// Undirected edge in canonical form (first < second).
using Edge = std::pair<NodeId, NodeId>;
using EdgeList = std::vector<Edge>;

// Attributed undirected graph. Single source of truth for a dataset:
// features, canonical edge set, labels, class count. Immutable after
// construction; adjacency is derived from the edge list on demand.
struct Graph {
    std::size_t num_nodes = 0;
    std::size_t num_classes = 0;
    Matrix features;              // num_nodes x num_features
    EdgeList edges;               // canonical i<j, sorted, no duplicates
    std::vector<int> labels;      // values in [0, num_classes)

    std::size_t num_features() const { return features.cols; }
};

// 10/10/80 node masks; pairwise disjoint, union covers all nodes.
struct SplitMasks {
    std::vector<std::uint8_t> train;
    std::vector<std::uint8_t> val;
    std::vector<std::uint8_t> test;

    std::size_t count(const std::vector<std::uint8_t>& m) const {
        std::size_t c = 0;
        for (auto v : m) c += v;
        return c;
    }
};

// Canonicalize (i,j) to i<j; drops nothing, callers filter self-loops.
inline Edge canonical_edge(NodeId a, NodeId b) {
    return a < b ? Edge{a, b} : Edge{b, a};
}

// Sort + dedupe a canonical edge list in place.
void normalize_edge_list(EdgeList& edges);

// Reads edges.tsv / features.csv / labels.csv / meta.json from dir_path.
// Throws config_error on missing files, dimension mismatches, non-numeric
// cells, or out-of-range indices. Duplicate and self-loop edge lines are
// dropped, surviving edges are canonical.
Graph load_graph(const std::string& dir_path);

// Planted-partition graph with equal-size communities. Features are
// standard normal noise with feature_shift added to a class-specific
// coordinate block. Deterministic given seed.
Graph generate_sbm(std::size_t n, std::size_t num_classes, double p_in, double p_out,
                   std::size_t d, double feature_shift, std::uint64_t seed);

// Uniform random 10/10/80 split (floor for train and val, remainder to
// test). Requires n >= 10 so every split is nonempty.
SplitMasks make_splits(const Graph& g, std::uint64_t seed);

// Per-node neighbor lists derived from the canonical edge set.
std::vector<std::vector<NodeId>> adjacency_lists(const Graph& g);

}  // namespace adngcl
