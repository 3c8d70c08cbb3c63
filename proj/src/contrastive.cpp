#include "adngcl/contrastive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adngcl/errors.hpp"

namespace adngcl {

namespace {

void normalize_rows(const Matrix& h, Matrix& u, std::vector<double>& inv_norm,
                    std::vector<std::uint8_t>& clamped) {
    const std::size_t n = h.rows, d = h.cols;
    u = Matrix(n, d);
    inv_norm.resize(n);
    clamped.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* hi = h.row(i);
        double norm = std::sqrt(dot(hi, hi, d));
        clamped[i] = norm < 1e-12 ? 1 : 0;
        if (clamped[i]) norm = 1e-12;
        inv_norm[i] = 1.0 / norm;
        double* ui = u.row(i);
        for (std::size_t j = 0; j < d; ++j) ui[j] = hi[j] * inv_norm[i];
    }
}

}  // namespace

PairContext make_pair_context(const Matrix& h1, const Matrix& h2, double tau) {
    if (tau <= 0.0) throw config_error("temperature must be positive");
    if (!h1.same_shape(h2)) throw numeric_error("view embeddings have mismatched shapes");
    if (!all_finite(h1) || !all_finite(h2))
        throw numeric_error("non-finite embeddings entering the loss");

    PairContext ctx;
    ctx.h1 = h1;
    ctx.h2 = h2;
    ctx.tau = tau;
    normalize_rows(ctx.h1, ctx.u1, ctx.inv_norm1, ctx.clamped1);
    normalize_rows(ctx.h2, ctx.u2, ctx.inv_norm2, ctx.clamped2);
    return ctx;
}

Matrix cosine_sim_matrix(const Matrix& ha, const Matrix& hb) {
    Matrix ua, ub;
    std::vector<double> ia, ib;
    std::vector<std::uint8_t> ca, cb;
    normalize_rows(ha, ua, ia, ca);
    normalize_rows(hb, ub, ib, cb);
    return matmul_nt(ua, ub);
}

std::vector<std::vector<std::uint32_t>> negatives_full(std::size_t n) {
    if (n < 2) throw config_error("need at least 2 nodes to form negative pairs");
    std::vector<std::vector<std::uint32_t>> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i].reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) out[i].push_back(static_cast<std::uint32_t>(j));
    }
    return out;
}

namespace {

// One direction of the symmetrized loss: anchors come from view a, the
// positive and the scheduled negatives from view b. Gradients accumulate
// into dha/dhb with an overall 1/(2n tau) scale folded in by the caller.
struct DirectionView {
    const Matrix& u_a;
    const Matrix& u_b;
    const std::vector<double>& inv_a;
    const std::vector<double>& inv_b;
    const std::vector<std::uint8_t>& cl_a;
    const std::vector<std::uint8_t>& cl_b;
    Matrix& dh_a;
    Matrix& dh_b;
};

// d(cos)/d(row): (u_other - s*u_self) * inv_norm_self; the s*u_self term
// vanishes for clamped rows because the guard freezes the denominator.
inline void add_cos_grad(double* grad_row, const double* u_self, const double* u_other,
                         double s, double inv_self, bool clamped_self, double coef,
                         std::size_t d) {
    if (clamped_self) {
        for (std::size_t k = 0; k < d; ++k) grad_row[k] += coef * inv_self * u_other[k];
    } else {
        for (std::size_t k = 0; k < d; ++k)
            grad_row[k] += coef * inv_self * (u_other[k] - s * u_self[k]);
    }
}

void run_direction(const DirectionView& v, const ActiveNegatives& active, double tau,
                   const LossOptions& opt, double& loss_sum,
                   std::array<double, num_categories>& cat_sums, double grad_scale) {
    const std::size_t n = v.u_a.rows;
    const std::size_t d = v.u_a.cols;
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();

    // per-anchor scratch, reused
    std::array<std::vector<std::pair<std::uint32_t, double>>, num_categories> inter_sims;
    std::array<std::vector<std::pair<std::uint32_t, double>>, num_categories> intra_sims;

    for (std::size_t i = 0; i < n; ++i) {
        const double* uai = v.u_a.row(i);
        const double s_pos = dot(uai, v.u_b.row(i), d);
        const double z_pos = s_pos / tau;

        std::size_t n_neg = 0;
        for (std::size_t c = 0; c < num_categories; ++c) {
            inter_sims[c].clear();
            intra_sims[c].clear();
            for (std::uint32_t j : active.sets[c][i]) {
                inter_sims[c].emplace_back(j, dot(uai, v.u_b.row(j), d));
                if (opt.intra_view_negatives)
                    intra_sims[c].emplace_back(j, dot(uai, v.u_a.row(j), d));
            }
            n_neg += inter_sims[c].size() + intra_sims[c].size();
        }

        // log-sum-exp of one category's restricted denominator
        auto lse_restricted = [&](bool include_pos, std::size_t cat) {
            double m = include_pos ? z_pos : neg_inf;
            for (const auto& [j, s] : inter_sims[cat]) m = std::max(m, s / tau);
            for (const auto& [j, s] : intra_sims[cat]) m = std::max(m, s / tau);
            double sum = include_pos ? std::exp(z_pos - m) : 0.0;
            for (const auto& [j, s] : inter_sims[cat]) sum += std::exp(s / tau - m);
            for (const auto& [j, s] : intra_sims[cat]) sum += std::exp(s / tau - m);
            return m + std::log(sum);
        };

        // full loss + gradients
        if (!(opt.literal_eq8 && n_neg == 0)) {
            double m = opt.literal_eq8 ? neg_inf : z_pos;
            for (std::size_t c = 0; c < num_categories; ++c) {
                for (const auto& [j, s] : inter_sims[c]) m = std::max(m, s / tau);
                for (const auto& [j, s] : intra_sims[c]) m = std::max(m, s / tau);
            }
            double sum = opt.literal_eq8 ? 0.0 : std::exp(z_pos - m);
            for (std::size_t c = 0; c < num_categories; ++c) {
                for (const auto& [j, s] : inter_sims[c]) sum += std::exp(s / tau - m);
                for (const auto& [j, s] : intra_sims[c]) sum += std::exp(s / tau - m);
            }
            loss_sum += (m + std::log(sum)) - z_pos;

            // d(loss)/d(z_pos): softmax weight minus one, or -1 in literal mode
            const double coef_pos =
                opt.literal_eq8 ? -1.0 : (std::exp(z_pos - m) / sum - 1.0);
            add_cos_grad(v.dh_a.row(i), uai, v.u_b.row(i), s_pos, v.inv_a[i], v.cl_a[i],
                         grad_scale * coef_pos, d);
            add_cos_grad(v.dh_b.row(i), v.u_b.row(i), uai, s_pos, v.inv_b[i], v.cl_b[i],
                         grad_scale * coef_pos, d);

            for (std::size_t c = 0; c < num_categories; ++c) {
                for (const auto& [j, s] : inter_sims[c]) {
                    const double coef = std::exp(s / tau - m) / sum;
                    add_cos_grad(v.dh_a.row(i), uai, v.u_b.row(j), s, v.inv_a[i], v.cl_a[i],
                                 grad_scale * coef, d);
                    add_cos_grad(v.dh_b.row(j), v.u_b.row(j), uai, s, v.inv_b[j], v.cl_b[j],
                                 grad_scale * coef, d);
                }
                for (const auto& [j, s] : intra_sims[c]) {
                    const double coef = std::exp(s / tau - m) / sum;
                    add_cos_grad(v.dh_a.row(i), uai, v.u_a.row(j), s, v.inv_a[i], v.cl_a[i],
                                 grad_scale * coef, d);
                    add_cos_grad(v.dh_a.row(j), v.u_a.row(j), uai, s, v.inv_a[j], v.cl_a[j],
                                 grad_scale * coef, d);
                }
            }
        }

        // per-category attribution: same formula, denominator restricted
        for (std::size_t c = 0; c < num_categories; ++c) {
            const bool empty = inter_sims[c].empty() && intra_sims[c].empty();
            if (empty) continue;  // contributes exactly 0 either way
            cat_sums[c] += lse_restricted(!opt.literal_eq8, c) - z_pos;
        }
    }
}

}  // namespace

LossResult info_nce_loss(const PairContext& ctx, const ActiveNegatives& active,
                         const LossOptions& opt) {
    const std::size_t n = ctx.n();
    if (active.n() != n) throw numeric_error("active negative sets sized for a different graph");

    LossResult r;
    r.dh1 = Matrix(ctx.h1.rows, ctx.h1.cols);
    r.dh2 = Matrix(ctx.h2.rows, ctx.h2.cols);

    double loss_sum = 0.0;
    std::array<double, num_categories> cat_sums{};
    const double grad_scale = 1.0 / (2.0 * static_cast<double>(n) * ctx.tau);

    DirectionView fwd{ctx.u1, ctx.u2, ctx.inv_norm1, ctx.inv_norm2,
                      ctx.clamped1, ctx.clamped2, r.dh1, r.dh2};
    run_direction(fwd, active, ctx.tau, opt, loss_sum, cat_sums, grad_scale);

    DirectionView rev{ctx.u2, ctx.u1, ctx.inv_norm2, ctx.inv_norm1,
                      ctx.clamped2, ctx.clamped1, r.dh2, r.dh1};
    run_direction(rev, active, ctx.tau, opt, loss_sum, cat_sums, grad_scale);

    const double denom = 2.0 * static_cast<double>(n);
    r.loss = loss_sum / denom;
    for (std::size_t c = 0; c < num_categories; ++c) r.per_category[c] = cat_sums[c] / denom;

    if (!std::isfinite(r.loss))
        throw numeric_error("contrastive loss is non-finite (temperature too small or "
                            "embeddings diverged)");
    return r;
}

}  // namespace adngcl
