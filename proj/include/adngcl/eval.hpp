#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "adngcl/graph.hpp"
#include "adngcl/neuralnet.hpp"

namespace adngcl {

// Multinomial logistic probe over frozen embeddings.
struct ProbeModel {
    Matrix w;                // emb_dim x num_classes
    std::vector<double> b;   // num_classes
    double lambda = 1e-4;
    std::size_t iters = 2000;
};

// Optional record of the training objective per iteration (tests check
// monotone descent at small learning rates).
struct ProbeTrace {
    std::vector<double> train_loss;
};

// Trained encoder applied to the original, un-augmented graph.
Matrix final_embeddings(const ModelParams& params, const Graph& g);

// Full-batch gradient descent on L2-regularized cross-entropy over the
// train rows only; every 100 iterations the current model is scored on the
// val split by accuracy and the best snapshot is returned. The descent step
// itself never sees val or test rows. lambda is scaled by 1/|train| and
// penalizes weights and bias alike (so lambda -> inf drives all logits to
// zero). Throws config_error if a class is absent from the train split.
ProbeModel train_probe(const Matrix& embeddings, const std::vector<int>& labels,
                       const SplitMasks& masks, double lambda, std::size_t iters, double lr,
                       std::uint64_t seed, ProbeTrace* trace = nullptr);

// Argmax class per node; ties go to the lowest class index.
std::vector<int> probe_predict(const ProbeModel& m, const Matrix& embeddings);

// For single-label multiclass prediction this equals accuracy over the
// masked nodes, and is computed as such. Throws config_error on an empty mask.
double micro_f1(const std::vector<int>& predictions, const std::vector<int>& labels,
                const std::vector<std::uint8_t>& mask);

// One line per node, comma-separated values, full double precision.
void export_embeddings(const Matrix& embeddings, const std::string& path);

}  // namespace adngcl
