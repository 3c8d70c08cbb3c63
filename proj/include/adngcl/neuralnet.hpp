#pragma once

#include <cstdint>
#include <vector>

#include "adngcl/graph.hpp"
#include "adngcl/linalg.hpp"

namespace adngcl {

// Symmetrically normalized adjacency with self-loops for one view,
// kept sparse: per-node self-loop coefficient plus one coefficient per
// undirected edge. apply() is the only consumer.
struct NormAdj {
    std::size_t n = 0;
    EdgeList edges;                       // canonical i<j
    std::vector<double> self_coeff;       // 1/deg~(i)
    std::vector<double> edge_coeff;       // 1/sqrt(deg~(i)*deg~(j)) per edge

    // Y = A_hat * X via scatter over edges; fixed accumulation order so
    // repeated runs are bit-identical.
    Matrix apply(const Matrix& x) const;
};

NormAdj normalize_adj(const EdgeList& view_edges, std::size_t n);

// Encoder (two graph-conv layers, ReLU then linear) plus projection head
// (affine, ELU, affine). Adam moments live beside each tensor so a model
// is one self-contained value.
struct ModelParams {
    Matrix w1, w2;              // d x h, h x h
    Matrix p1, p2;              // h x h_p, h_p x h_p
    std::vector<double> b1, b2; // h_p each

    Matrix m_w1, v_w1, m_w2, v_w2, m_p1, v_p1, m_p2, v_p2;
    std::vector<double> m_b1, v_b1, m_b2, v_b2;
    std::uint64_t t = 0;        // adam step counter

    std::size_t hidden() const { return w1.cols; }
    std::size_t proj_dim() const { return p1.cols; }
};

struct Gradients {
    Matrix w1, w2, p1, p2;
    std::vector<double> b1, b2;
};

// Intermediate activations for one view, kept so backward() can run
// without recomputing the forward pass.
struct ForwardCache {
    Matrix features;   // masked input X_hat
    Matrix z1pre;      // A * (X_hat * W1)
    Matrix z1;         // ReLU(z1pre)
    Matrix az1;        // A * z1
    Matrix z;          // az1 * W2   (encoder output)
    Matrix p1pre;      // z * P1 + b1
    Matrix p1act;      // ELU(p1pre)
    Matrix h;          // p1act * P2 + b2  (projector output)
};

// Full forward pass for one view. Throws numeric_error if any output is
// non-finite (exploded parameters).
ForwardCache forward(const ModelParams& p, const NormAdj& adj, const Matrix& x);

// Encoder output only (used when embedding nodes after training).
Matrix encode(const ModelParams& p, const NormAdj& adj, const Matrix& x);

// Reverse-mode gradients of the full encode->project pipeline for both
// views, summed. dh1/dh2 are dL/dH for each view's projector output.
Gradients backward(const ModelParams& p, const NormAdj& adj1, const NormAdj& adj2,
                   const ForwardCache& c1, const ForwardCache& c2,
                   const Matrix& dh1, const Matrix& dh2);

struct AdamConfig {
    double lr = 5e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// In-place Adam update with bias correction; increments p.t.
void adam_step(ModelParams& p, const Gradients& g, const AdamConfig& cfg);

// Glorot-uniform weights, zero biases and moments; deterministic given seed.
ModelParams init_params(std::size_t d, std::size_t h, std::size_t h_p, std::uint64_t seed);

}  // namespace adngcl
