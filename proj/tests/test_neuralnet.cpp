#include <doctest.h>

#include <cmath>
#include <vector>

#include "adngcl/errors.hpp"
#include "adngcl/neuralnet.hpp"
#include "adngcl/rng.hpp"

using namespace adngcl;

namespace {

Matrix ones_column(std::size_t n) {
    Matrix m(n, 1);
    m.fill(1.0);
    return m;
}

double sum_sq(const Matrix& m) {
    double s = 0.0;
    for (double v : m.data) s += v * v;
    return s;
}

// Scalar objective 0.5*(|H1|^2 + |H2|^2) of the full two-view pipeline,
// used to check backward() against central finite differences.
double pipeline_objective(const ModelParams& p, const NormAdj& a1, const NormAdj& a2,
                          const Matrix& x1, const Matrix& x2) {
    return 0.5 * (sum_sq(forward(p, a1, x1).h) + sum_sq(forward(p, a2, x2).h));
}

struct ParamSlot {
    double* value;
    const double* grad;
};

// Flat view over every trainable coordinate and its analytic gradient.
std::vector<ParamSlot> all_slots(ModelParams& p, const Gradients& g) {
    std::vector<ParamSlot> slots;
    auto add_mat = [&](Matrix& m, const Matrix& gm) {
        for (std::size_t i = 0; i < m.data.size(); ++i)
            slots.push_back({&m.data[i], &gm.data[i]});
    };
    auto add_vec = [&](std::vector<double>& v, const std::vector<double>& gv) {
        for (std::size_t i = 0; i < v.size(); ++i) slots.push_back({&v[i], &gv[i]});
    };
    add_mat(p.w1, g.w1);
    add_mat(p.w2, g.w2);
    add_mat(p.p1, g.p1);
    add_mat(p.p2, g.p2);
    add_vec(p.b1, g.b1);
    add_vec(p.b2, g.b2);
    return slots;
}

}  // namespace

TEST_CASE("normalize_adj on a single isolated node is the identity") {
    NormAdj a = normalize_adj({}, 1);
    Matrix y = a.apply(ones_column(1));
    CHECK(y(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("normalize_adj two nodes one edge gives all entries 1/2") {
    NormAdj a = normalize_adj({{0, 1}}, 2);

    // Column probes recover the dense operator.
    Matrix e0(2, 1), e1(2, 1);
    e0(0, 0) = 1.0;
    e1(1, 0) = 1.0;
    Matrix c0 = a.apply(e0), c1 = a.apply(e1);
    CHECK(c0(0, 0) == doctest::Approx(0.5));
    CHECK(c0(1, 0) == doctest::Approx(0.5));
    CHECK(c1(0, 0) == doctest::Approx(0.5));
    CHECK(c1(1, 0) == doctest::Approx(0.5));
}

TEST_CASE("normalize_adj row sums are exactly 1 on a regular graph") {
    // 12-cycle: every node has degree 2.
    EdgeList ring;
    for (NodeId i = 0; i < 12; ++i) ring.push_back(canonical_edge(i, (i + 1) % 12));
    normalize_edge_list(ring);

    Matrix y = normalize_adj(ring, 12).apply(ones_column(12));
    for (std::size_t i = 0; i < 12; ++i) CHECK(y(i, 0) == doctest::Approx(1.0));
}

TEST_CASE("normalize_adj entries are positive and at most 1") {
    Graph g = generate_sbm(60, 3, 0.3, 0.05, 4, 0.0, 31);
    NormAdj a = normalize_adj(g.edges, 60);
    for (double v : a.self_coeff) {
        CHECK(v > 0.0);
        CHECK(v <= 1.0);
    }
    for (double v : a.edge_coeff) {
        CHECK(v > 0.0);
        CHECK(v <= 1.0);
    }
    // Applied to all-ones, every output stays strictly positive.
    Matrix y = a.apply(ones_column(60));
    for (std::size_t i = 0; i < 60; ++i) CHECK(y(i, 0) > 0.0);
}

TEST_CASE("normalize_adj is the symmetric normalization, not row-stochastic") {
    // Path 0-1-2: the center's row sum is 1/3 + 2/sqrt(6) ~ 1.1498 under
    // D^{-1/2} A D^{-1/2}; a row-normalized operator would give exactly 1.
    Matrix y = normalize_adj({{0, 1}, {1, 2}}, 3).apply(ones_column(3));
    CHECK(y(1, 0) == doctest::Approx(1.0 / 3.0 + 2.0 / std::sqrt(6.0)));
    CHECK(y(1, 0) > 1.0);
}

TEST_CASE("encode with zero weights returns zero") {
    ModelParams p = init_params(3, 4, 2, 0);
    p.w1.fill(0.0);
    p.w2.fill(0.0);
    Graph g = generate_sbm(12, 3, 0.5, 0.1, 3, 1.0, 1);
    Matrix z = encode(p, normalize_adj(g.edges, 12), g.features);
    for (double v : z.data) CHECK(v == 0.0);
}

TEST_CASE("encode on an isolated node with identity weights reproduces the input") {
    // One node, no edges: adj is the identity, so Z = relu(x W1) W2 = x for
    // identity W blocks and nonnegative x.
    ModelParams p = init_params(3, 3, 2, 0);
    p.w1.fill(0.0);
    p.w2.fill(0.0);
    for (std::size_t i = 0; i < 3; ++i) {
        p.w1(i, i) = 1.0;
        p.w2(i, i) = 1.0;
    }
    Matrix x(1, 3);
    x(0, 0) = 0.3;
    x(0, 1) = 0.0;
    x(0, 2) = 2.7;

    Matrix z = encode(p, normalize_adj({}, 1), x);
    CHECK(z(0, 0) == doctest::Approx(0.3));
    CHECK(z(0, 1) == doctest::Approx(0.0));
    CHECK(z(0, 2) == doctest::Approx(2.7));
}

TEST_CASE("projector head: zero params give zero, pure bias broadcasts") {
    ModelParams p = init_params(2, 3, 2, 5);
    Graph g = generate_sbm(9, 3, 0.5, 0.1, 2, 1.0, 2);
    NormAdj adj = normalize_adj(g.edges, 9);

    SUBCASE("all projector params zero") {
        p.p1.fill(0.0);
        p.p2.fill(0.0);
        ForwardCache c = forward(p, adj, g.features);
        for (double v : c.h.data) CHECK(v == 0.0);
    }
    SUBCASE("zero encoder, bias-only projector") {
        p.w1.fill(0.0);  // Z = 0
        p.p1.fill(0.0);
        p.b2 = {1.5, -0.25};
        ForwardCache c = forward(p, adj, g.features);
        for (std::size_t i = 0; i < 9; ++i) {
            CHECK(c.h(i, 0) == doctest::Approx(1.5));
            CHECK(c.h(i, 1) == doctest::Approx(-0.25));
        }
    }
}

TEST_CASE("forward flags non-finite activations") {
    ModelParams p = init_params(2, 2, 2, 3);
    p.w1.fill(1e200);
    p.w2.fill(1e200);
    Matrix x(2, 2);
    x.fill(1e200);
    CHECK_THROWS_AS(forward(p, normalize_adj({{0, 1}}, 2), x), numeric_error);
}

TEST_CASE("backward with zero upstream gradient returns zero everywhere") {
    Graph g = generate_sbm(6, 2, 0.6, 0.2, 3, 1.0, 4);
    NormAdj adj = normalize_adj(g.edges, 6);
    ModelParams p = init_params(3, 4, 3, 7);
    ForwardCache c1 = forward(p, adj, g.features);
    ForwardCache c2 = forward(p, adj, g.features);

    Matrix zero(6, 3);
    Gradients grads = backward(p, adj, adj, c1, c2, zero, zero);
    for (double v : grads.w1.data) CHECK(v == 0.0);
    for (double v : grads.w2.data) CHECK(v == 0.0);
    for (double v : grads.p1.data) CHECK(v == 0.0);
    for (double v : grads.p2.data) CHECK(v == 0.0);
    for (double v : grads.b1) CHECK(v == 0.0);
    for (double v : grads.b2) CHECK(v == 0.0);
}

TEST_CASE("backward matches central finite differences on a 6-node graph") {
    Graph g = generate_sbm(6, 2, 0.7, 0.3, 3, 1.0, 11);
    // Two distinct views: different edge subsets and inputs.
    EdgeList edges2 = g.edges;
    if (edges2.size() > 1) edges2.pop_back();
    NormAdj a1 = normalize_adj(g.edges, 6);
    NormAdj a2 = normalize_adj(edges2, 6);
    Matrix x2 = g.features;
    x2(0, 0) += 0.5;
    x2(3, 2) = 0.0;

    ModelParams p = init_params(3, 5, 4, 13);
    ForwardCache c1 = forward(p, a1, g.features);
    ForwardCache c2 = forward(p, a2, x2);
    Gradients grads = backward(p, a1, a2, c1, c2, c1.h, c2.h);

    const double step = 1e-5;
    double worst = 0.0;
    for (ParamSlot slot : all_slots(p, grads)) {
        const double saved = *slot.value;
        *slot.value = saved + step;
        const double up = pipeline_objective(p, a1, a2, g.features, x2);
        *slot.value = saved - step;
        const double down = pipeline_objective(p, a1, a2, g.features, x2);
        *slot.value = saved;

        const double fd = (up - down) / (2 * step);
        const double analytic = *slot.grad;
        const double rel =
            std::abs(analytic - fd) / std::max({std::abs(analytic), std::abs(fd), 1e-4});
        worst = std::max(worst, rel);
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("backward of a dead relu unit is exactly zero") {
    // Drive hidden unit 0 negative for every node: large negative W1 column
    // against strictly positive inputs.
    Matrix x(4, 2);
    x.fill(1.0);
    ModelParams p = init_params(2, 3, 2, 17);
    p.w1(0, 0) = -50.0;
    p.w1(1, 0) = -50.0;

    NormAdj adj = normalize_adj({{0, 1}, {1, 2}, {2, 3}}, 4);
    ForwardCache c = forward(p, adj, x);
    for (std::size_t i = 0; i < 4; ++i) CHECK(c.z1(i, 0) == 0.0);

    Gradients grads = backward(p, adj, adj, c, c, c.h, c.h);
    CHECK(grads.w1(0, 0) == 0.0);
    CHECK(grads.w1(1, 0) == 0.0);
    // W2's row for the dead unit receives zero activation, so its gradient
    // vanishes too.
    for (std::size_t j = 0; j < 3; ++j) CHECK(grads.w2(0, j) == 0.0);
}

TEST_CASE("adam_step with zero gradient leaves parameters unchanged") {
    ModelParams p = init_params(3, 4, 2, 19);
    ModelParams before = p;
    Gradients g;
    g.w1 = Matrix(3, 4);
    g.w2 = Matrix(4, 4);
    g.p1 = Matrix(4, 2);
    g.p2 = Matrix(2, 2);
    g.b1.assign(2, 0.0);
    g.b2.assign(2, 0.0);

    adam_step(p, g, {});
    CHECK(p.w1.data == before.w1.data);
    CHECK(p.w2.data == before.w2.data);
    CHECK(p.p1.data == before.p1.data);
    CHECK(p.p2.data == before.p2.data);
    CHECK(p.t == 1);
}

TEST_CASE("first adam step has magnitude ~lr per coordinate") {
    ModelParams p = init_params(2, 2, 2, 23);
    ModelParams before = p;
    Gradients g;
    g.w1 = Matrix(2, 2);
    g.w1.fill(0.7);
    g.w2 = Matrix(2, 2);
    g.w2.fill(-1.3);
    g.p1 = Matrix(2, 2);
    g.p1.fill(0.01);
    g.p2 = Matrix(2, 2);
    g.p2.fill(2.0);
    g.b1.assign(2, 0.5);
    g.b2.assign(2, -0.5);

    AdamConfig cfg;
    cfg.lr = 5e-4;
    adam_step(p, g, cfg);

    // With bias correction, step 1 moves each coordinate by lr*g/(|g|+eps') ~ lr*sign(g).
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(p.w1.data[i] == doctest::Approx(before.w1.data[i] - cfg.lr).epsilon(1e-4));
        CHECK(p.w2.data[i] == doctest::Approx(before.w2.data[i] + cfg.lr).epsilon(1e-4));
        CHECK(p.p2.data[i] == doctest::Approx(before.p2.data[i] - cfg.lr).epsilon(1e-4));
    }
    CHECK(p.b1[0] == doctest::Approx(before.b1[0] - cfg.lr).epsilon(1e-4));
    CHECK(p.b2[0] == doctest::Approx(before.b2[0] + cfg.lr).epsilon(1e-4));
}

TEST_CASE("adam trajectories are reproducible") {
    auto run = [] {
        ModelParams p = init_params(2, 3, 2, 29);
        Graph g = generate_sbm(8, 2, 0.6, 0.2, 2, 1.0, 6);
        NormAdj adj = normalize_adj(g.edges, 8);
        for (int step = 0; step < 25; ++step) {
            ForwardCache c = forward(p, adj, g.features);
            Gradients grads = backward(p, adj, adj, c, c, c.h, c.h);
            adam_step(p, grads, {});
        }
        return p;
    };
    ModelParams a = run(), b = run();
    CHECK(a.w1.data == b.w1.data);
    CHECK(a.w2.data == b.w2.data);
    CHECK(a.p1.data == b.p1.data);
    CHECK(a.p2.data == b.p2.data);
    CHECK(a.t == b.t);
}

TEST_CASE("init_params draws glorot-uniform weights") {
    const std::size_t d = 40, h = 60, h_p = 20;
    ModelParams p = init_params(d, h, h_p, 101);

    SUBCASE("shapes and zero biases/moments") {
        CHECK(p.w1.rows == d);
        CHECK(p.w1.cols == h);
        CHECK(p.w2.rows == h);
        CHECK(p.w2.cols == h);
        CHECK(p.p1.rows == h);
        CHECK(p.p1.cols == h_p);
        CHECK(p.p2.rows == h_p);
        CHECK(p.p2.cols == h_p);
        for (double v : p.b1) CHECK(v == 0.0);
        for (double v : p.b2) CHECK(v == 0.0);
        for (double v : p.m_w1.data) CHECK(v == 0.0);
        for (double v : p.v_w2.data) CHECK(v == 0.0);
        CHECK(p.t == 0);
    }

    SUBCASE("entries respect the glorot bound") {
        const double bound_w1 = std::sqrt(6.0 / (d + h));
        for (double v : p.w1.data) CHECK(std::abs(v) <= bound_w1);
        const double bound_w2 = std::sqrt(6.0 / (h + h));
        for (double v : p.w2.data) CHECK(std::abs(v) <= bound_w2);
    }

    SUBCASE("sample mean consistent with a zero-mean uniform") {
        const double bound = std::sqrt(6.0 / (d + h));
        double mean = 0.0;
        for (double v : p.w1.data) mean += v;
        mean /= static_cast<double>(p.w1.data.size());
        // var of uniform(-a, a) = a^2/3; 4-sigma band for the 2400-sample mean.
        const double sigma_mean = bound / std::sqrt(3.0 * 2400.0);
        CHECK(std::abs(mean) < 4 * sigma_mean);
    }

    SUBCASE("deterministic per seed") {
        ModelParams q = init_params(d, h, h_p, 101);
        ModelParams r = init_params(d, h, h_p, 102);
        CHECK(p.w1.data == q.w1.data);
        CHECK(p.p2.data == q.p2.data);
        CHECK(p.w1.data != r.w1.data);
    }
}
