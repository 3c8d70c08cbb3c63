#include "adngcl/augment.hpp"

#include <algorithm>
#include <numeric>

#include "adngcl/errors.hpp"
#include "adngcl/rng.hpp"

namespace adngcl {

EdgeList drop_edges(const EdgeList& edges, double p_e, std::mt19937_64& rng) {
    if (p_e == 0.0) return edges;
    EdgeList kept;
    kept.reserve(edges.size());
    std::bernoulli_distribution keep(1.0 - p_e);
    for (const auto& e : edges)
        if (keep(rng)) kept.push_back(e);
    return kept;
}

Matrix mask_features_v1(const Matrix& x, double p_f, std::mt19937_64& rng) {
    Matrix out = x;
    if (p_f == 0.0) return out;
    std::bernoulli_distribution keep(1.0 - p_f);
    std::vector<std::uint8_t> nu(x.cols);
    for (std::size_t j = 0; j < x.cols; ++j) nu[j] = keep(rng) ? 1 : 0;
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t j = 0; j < x.cols; ++j)
            if (!nu[j]) out(i, j) = 0.0;
    return out;
}

Matrix mask_features_v2(const Matrix& x, double p_f, std::mt19937_64& rng) {
    const std::size_t d = x.cols;
    if (d < 2) throw config_error("mask_features_v2: need at least 2 feature columns");

    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t n_fixed = (d + 1) / 2;

    std::vector<std::uint8_t> fixed(d, 0);
    for (std::size_t k = 0; k < n_fixed; ++k) fixed[order[k]] = 1;

    Matrix out = x;
    std::bernoulli_distribution keep(1.0 - p_f);
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t j = 0; j < d; ++j)
            if (!fixed[j] && !keep(rng)) out(i, j) = 0.0;
    return out;
}

std::pair<View, View> make_views(const Graph& g, const AugmentConfig& cfg, std::uint64_t epoch) {
    auto sub = [&](std::uint64_t k) {
        return make_stream(cfg.rng_seed, stream_tag::augment, epoch, k);
    };
    auto rng_e1 = sub(0);
    auto rng_f1 = sub(1);
    auto rng_e2 = sub(2);
    auto rng_f2 = sub(3);

    View v1{drop_edges(g.edges, cfg.p_e, rng_e1), mask_features_v1(g.features, cfg.p_f1, rng_f1)};
    View v2{drop_edges(g.edges, cfg.p_e, rng_e2), mask_features_v2(g.features, cfg.p_f2, rng_f2)};
    return {std::move(v1), std::move(v2)};
}

}  // namespace adngcl
