#pragma once

#include <cstdint>
#include <random>

#include "adngcl/graph.hpp"

namespace adngcl {

struct AugmentConfig {
    double p_e = 0.4;   // edge-drop probability, [0,1)
    double p_f1 = 0.3;  // view-1 column-mask probability, [0,1)
    double p_f2 = 0.3;  // view-2 element-mask probability, [0,1)
    std::uint64_t rng_seed = 0;
};

struct View {
    EdgeList edges;   // subset of the source graph's edges
    Matrix features;  // same shape as the source features
};

// Keeps each undirected edge independently with probability 1 - p_e. A single
// draw per edge keeps the implied adjacency symmetric.
EdgeList drop_edges(const EdgeList& edges, double p_e, std::mt19937_64& rng);

// Zeroes whole columns: column j survives with probability 1 - p_f.
Matrix mask_features_v1(const Matrix& x, double p_f, std::mt19937_64& rng);

// Fixes a uniformly random ceil(d/2)-subset of columns; the remaining columns
// get an element-wise Bernoulli(1 - p_f) keep mask. Requires d >= 2.
Matrix mask_features_v2(const Matrix& x, double p_f, std::mt19937_64& rng);

// Two stochastic views of the graph; all randomness is a pure function of
// (cfg.rng_seed, epoch).
std::pair<View, View> make_views(const Graph& g, const AugmentConfig& cfg, std::uint64_t epoch);

}  // namespace adngcl
