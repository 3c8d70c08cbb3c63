#include "adngcl/neuralnet.hpp"

#include <cmath>

#include "adngcl/errors.hpp"
#include "adngcl/rng.hpp"

namespace adngcl {

Matrix NormAdj::apply(const Matrix& x) const {
    Matrix y(x.rows, x.cols);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = self_coeff[i];
        const double* xi = x.row(i);
        double* yi = y.row(i);
        for (std::size_t j = 0; j < x.cols; ++j) yi[j] = s * xi[j];
    }
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto [a, b] = edges[e];
        const double w = edge_coeff[e];
        const double* xa = x.row(a);
        const double* xb = x.row(b);
        double* ya = y.row(a);
        double* yb = y.row(b);
        for (std::size_t j = 0; j < x.cols; ++j) {
            ya[j] += w * xb[j];
            yb[j] += w * xa[j];
        }
    }
    return y;
}

NormAdj normalize_adj(const EdgeList& view_edges, std::size_t n) {
    NormAdj a;
    a.n = n;
    a.edges = view_edges;

    std::vector<double> deg(n, 1.0);  // self-loop counts toward the degree
    for (const auto& [u, v] : view_edges) {
        deg[u] += 1.0;
        deg[v] += 1.0;
    }

    a.self_coeff.resize(n);
    for (std::size_t i = 0; i < n; ++i) a.self_coeff[i] = 1.0 / deg[i];

    a.edge_coeff.resize(view_edges.size());
    for (std::size_t e = 0; e < view_edges.size(); ++e) {
        const auto [u, v] = view_edges[e];
        a.edge_coeff[e] = 1.0 / std::sqrt(deg[u] * deg[v]);
    }
    return a;
}

namespace {

inline double elu(double x) { return x > 0.0 ? x : std::expm1(x); }
inline double elu_grad(double pre) { return pre > 0.0 ? 1.0 : std::exp(pre); }

void check_finite(const Matrix& m, const char* what) {
    if (!all_finite(m))
        throw numeric_error(std::string("non-finite values in ") + what +
                            " (parameters likely diverged)");
}

}  // namespace

ForwardCache forward(const ModelParams& p, const NormAdj& adj, const Matrix& x) {
    ForwardCache c;
    c.features = x;
    c.z1pre = adj.apply(matmul(x, p.w1));
    c.z1 = c.z1pre;
    for (double& v : c.z1.data) v = v > 0.0 ? v : 0.0;
    c.az1 = adj.apply(c.z1);
    c.z = matmul(c.az1, p.w2);
    check_finite(c.z, "encoder output");

    c.p1pre = matmul(c.z, p.p1);
    add_row_vector(c.p1pre, p.b1);
    c.p1act = c.p1pre;
    for (double& v : c.p1act.data) v = elu(v);
    c.h = matmul(c.p1act, p.p2);
    add_row_vector(c.h, p.b2);
    check_finite(c.h, "projector output");
    return c;
}

Matrix encode(const ModelParams& p, const NormAdj& adj, const Matrix& x) {
    Matrix z1 = adj.apply(matmul(x, p.w1));
    for (double& v : z1.data) v = v > 0.0 ? v : 0.0;
    Matrix z = matmul(adj.apply(z1), p.w2);
    check_finite(z, "encoder output");
    return z;
}

namespace {

// Accumulates one view's contribution into g. The adjacency is symmetric,
// so the transpose in each A^T-step is apply() itself.
void backward_view(const ModelParams& p, const NormAdj& adj, const ForwardCache& c,
                   const Matrix& dh, Gradients& g) {
    // projector
    Matrix dp2 = matmul_tn(c.p1act, dh);
    std::vector<double> db2 = column_sums(dh);

    Matrix dp1pre = matmul_nt(dh, p.p2);  // dH * P2^T
    for (std::size_t k = 0; k < dp1pre.data.size(); ++k)
        dp1pre.data[k] *= elu_grad(c.p1pre.data[k]);

    Matrix dp1 = matmul_tn(c.z, dp1pre);
    std::vector<double> db1 = column_sums(dp1pre);
    Matrix dz = matmul_nt(dp1pre, p.p1);  // dP1pre * P1^T

    // encoder
    Matrix dw2 = matmul_tn(c.az1, dz);
    Matrix dz1 = adj.apply(matmul_nt(dz, p.w2));
    for (std::size_t k = 0; k < dz1.data.size(); ++k)
        if (c.z1pre.data[k] <= 0.0) dz1.data[k] = 0.0;
    Matrix df = adj.apply(dz1);
    Matrix dw1 = matmul_tn(c.features, df);

    for (std::size_t k = 0; k < g.w1.data.size(); ++k) g.w1.data[k] += dw1.data[k];
    for (std::size_t k = 0; k < g.w2.data.size(); ++k) g.w2.data[k] += dw2.data[k];
    for (std::size_t k = 0; k < g.p1.data.size(); ++k) g.p1.data[k] += dp1.data[k];
    for (std::size_t k = 0; k < g.p2.data.size(); ++k) g.p2.data[k] += dp2.data[k];
    for (std::size_t k = 0; k < g.b1.size(); ++k) g.b1[k] += db1[k];
    for (std::size_t k = 0; k < g.b2.size(); ++k) g.b2[k] += db2[k];
}

}  // namespace

Gradients backward(const ModelParams& p, const NormAdj& adj1, const NormAdj& adj2,
                   const ForwardCache& c1, const ForwardCache& c2,
                   const Matrix& dh1, const Matrix& dh2) {
    if (!dh1.same_shape(c1.h) || !dh2.same_shape(c2.h))
        throw numeric_error("backward: upstream gradient shape mismatch");

    Gradients g;
    g.w1 = Matrix(p.w1.rows, p.w1.cols);
    g.w2 = Matrix(p.w2.rows, p.w2.cols);
    g.p1 = Matrix(p.p1.rows, p.p1.cols);
    g.p2 = Matrix(p.p2.rows, p.p2.cols);
    g.b1.assign(p.b1.size(), 0.0);
    g.b2.assign(p.b2.size(), 0.0);

    backward_view(p, adj1, c1, dh1, g);
    backward_view(p, adj2, c2, dh2, g);
    return g;
}

namespace {

void adam_update(double* p, const double* g, double* m, double* v, std::size_t len,
                 const AdamConfig& cfg, double bc1, double bc2) {
    for (std::size_t k = 0; k < len; ++k) {
        m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * g[k];
        v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * g[k] * g[k];
        const double mhat = m[k] / bc1;
        const double vhat = v[k] / bc2;
        p[k] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
}

}  // namespace

void adam_step(ModelParams& p, const Gradients& g, const AdamConfig& cfg) {
    p.t += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(p.t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(p.t));

    adam_update(p.w1.data.data(), g.w1.data.data(), p.m_w1.data.data(), p.v_w1.data.data(),
                p.w1.data.size(), cfg, bc1, bc2);
    adam_update(p.w2.data.data(), g.w2.data.data(), p.m_w2.data.data(), p.v_w2.data.data(),
                p.w2.data.size(), cfg, bc1, bc2);
    adam_update(p.p1.data.data(), g.p1.data.data(), p.m_p1.data.data(), p.v_p1.data.data(),
                p.p1.data.size(), cfg, bc1, bc2);
    adam_update(p.p2.data.data(), g.p2.data.data(), p.m_p2.data.data(), p.v_p2.data.data(),
                p.p2.data.size(), cfg, bc1, bc2);
    adam_update(p.b1.data(), g.b1.data(), p.m_b1.data(), p.v_b1.data(), p.b1.size(), cfg, bc1, bc2);
    adam_update(p.b2.data(), g.b2.data(), p.m_b2.data(), p.v_b2.data(), p.b2.size(), cfg, bc1, bc2);
}

ModelParams init_params(std::size_t d, std::size_t h, std::size_t h_p, std::uint64_t seed) {
    auto rng = make_stream(seed, stream_tag::init);
    auto glorot = [&](std::size_t fan_in, std::size_t fan_out) {
        Matrix m(fan_in, fan_out);
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        std::uniform_real_distribution<double> u(-limit, limit);
        for (double& v : m.data) v = u(rng);
        return m;
    };

    ModelParams p;
    p.w1 = glorot(d, h);
    p.w2 = glorot(h, h);
    p.p1 = glorot(h, h_p);
    p.p2 = glorot(h_p, h_p);
    p.b1.assign(h_p, 0.0);
    p.b2.assign(h_p, 0.0);

    p.m_w1 = Matrix(d, h);
    p.v_w1 = Matrix(d, h);
    p.m_w2 = Matrix(h, h);
    p.v_w2 = Matrix(h, h);
    p.m_p1 = Matrix(h, h_p);
    p.v_p1 = Matrix(h, h_p);
    p.m_p2 = Matrix(h_p, h_p);
    p.v_p2 = Matrix(h_p, h_p);
    p.m_b1.assign(h_p, 0.0);
    p.v_b1.assign(h_p, 0.0);
    p.m_b2.assign(h_p, 0.0);
    p.v_b2.assign(h_p, 0.0);
    p.t = 0;
    return p;
}

}  // namespace adngcl
