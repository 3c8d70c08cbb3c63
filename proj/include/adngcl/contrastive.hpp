#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "adngcl/linalg.hpp"

namespace adngcl {

// Hardness categories in scheduling order. The order matters: the scheduler's
// round-robin cursor walks hard -> inter -> easy.
enum Category : int { cat_hard = 0, cat_inter = 1, cat_easy = 2 };
inline constexpr std::size_t num_categories = 3;

// Projected embeddings of the two views plus guarded row norms, preparing
// cosine similarities at temperature tau. Rows with norm < 1e-12 are treated
// as having norm exactly 1e-12 (the gradient respects the guard).
struct PairContext {
    Matrix h1, h2;                    // raw projector outputs, n x h_p
    Matrix u1, u2;                    // rows divided by guarded norms
    std::vector<double> inv_norm1, inv_norm2;
    std::vector<std::uint8_t> clamped1, clamped2;
    double tau = 0.5;

    std::size_t n() const { return h1.rows; }
};

PairContext make_pair_context(const Matrix& h1, const Matrix& h2, double tau);

// Scheduled negatives: for each category and anchor, the opposing-view node
// indices currently active. Lists are disjoint across categories per anchor
// and never contain the anchor itself.
struct ActiveNegatives {
    std::array<std::vector<std::vector<std::uint32_t>>, num_categories> sets;

    explicit ActiveNegatives(std::size_t n = 0) {
        for (auto& s : sets) s.resize(n);
    }
    std::size_t n() const { return sets[0].size(); }
    std::size_t total_count(Category c) const {
        std::size_t t = 0;
        for (const auto& v : sets[c]) t += v.size();
        return t;
    }
};

struct LossOptions {
    bool literal_eq8 = false;        // drop the positive term from the denominator
    bool intra_view_negatives = false;  // also contrast against same-view rows
};

struct LossResult {
    double loss = 0.0;
    std::array<double, num_categories> per_category{};
    Matrix dh1, dh2;  // dL/dH1, dL/dH2
};

// Symmetrized InfoNCE over the scheduled negatives. Anchor h_i^1 contrasts
// its positive h_i^2 against the active opposing-view rows {h_j^2}; the
// swapped direction uses h_i^2 against {h_j^1} with the same index sets.
// per_category[c] re-evaluates the loss with the denominator's negative sum
// restricted to category c. Gradients are exact for the guarded cosine.
LossResult info_nce_loss(const PairContext& ctx, const ActiveNegatives& active,
                         const LossOptions& opt = {});

// All j != i for each anchor: the full candidate pool before scheduling.
std::vector<std::vector<std::uint32_t>> negatives_full(std::size_t n);

// S[i][j] = cosine(ha row i, hb row j), guarded like PairContext.
Matrix cosine_sim_matrix(const Matrix& ha, const Matrix& hb);

}  // namespace adngcl
