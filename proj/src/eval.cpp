#include "adngcl/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include "adngcl/errors.hpp"

namespace adngcl {

Matrix final_embeddings(const ModelParams& params, const Graph& g) {
    const NormAdj adj = normalize_adj(g.edges, g.num_nodes);
    return encode(params, adj, g.features);
}

namespace {

struct RowSet {
    Matrix x;             // selected rows
    std::vector<int> y;   // their labels
};

RowSet gather_rows(const Matrix& emb, const std::vector<int>& labels,
                   const std::vector<std::uint8_t>& mask) {
    std::size_t count = 0;
    for (auto v : mask) count += v;
    RowSet r;
    r.x = Matrix(count, emb.cols);
    r.y.reserve(count);
    std::size_t w = 0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask[i]) continue;
        std::copy(emb.row(i), emb.row(i) + emb.cols, r.x.row(w));
        r.y.push_back(labels[i]);
        ++w;
    }
    return r;
}

// logits -> per-row softmax probabilities, in place
void softmax_rows(Matrix& m) {
    for (std::size_t i = 0; i < m.rows; ++i) {
        double* row = m.row(i);
        double mx = row[0];
        for (std::size_t j = 1; j < m.cols; ++j) mx = std::max(mx, row[j]);
        double sum = 0.0;
        for (std::size_t j = 0; j < m.cols; ++j) {
            row[j] = std::exp(row[j] - mx);
            sum += row[j];
        }
        for (std::size_t j = 0; j < m.cols; ++j) row[j] /= sum;
    }
}

Matrix logits_of(const Matrix& x, const Matrix& w, const std::vector<double>& b) {
    Matrix z = matmul(x, w);
    add_row_vector(z, b);
    return z;
}

double objective(const Matrix& x, const std::vector<int>& y, const Matrix& w,
                 const std::vector<double>& b, double reg) {
    Matrix p = logits_of(x, w, b);
    softmax_rows(p);
    double ce = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i)
        ce -= std::log(std::max(p(i, static_cast<std::size_t>(y[i])), 1e-300));
    ce /= static_cast<double>(x.rows);
    double penalty = 0.0;
    for (double v : w.data) penalty += v * v;
    for (double v : b) penalty += v * v;
    return ce + 0.5 * reg * penalty;
}

double accuracy_on(const Matrix& x, const std::vector<int>& y, const Matrix& w,
                   const std::vector<double>& b) {
    if (x.rows == 0) return 0.0;
    Matrix z = logits_of(x, w, b);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < z.rows; ++i) {
        const double* row = z.row(i);
        std::size_t best = 0;
        for (std::size_t j = 1; j < z.cols; ++j)
            if (row[j] > row[best]) best = j;
        if (static_cast<int>(best) == y[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(z.rows);
}

}  // namespace

ProbeModel train_probe(const Matrix& embeddings, const std::vector<int>& labels,
                       const SplitMasks& masks, double lambda, std::size_t iters, double lr,
                       std::uint64_t seed, ProbeTrace* trace) {
    (void)seed;  // the probe is deterministic: zero init, full-batch descent

    const RowSet train = gather_rows(embeddings, labels, masks.train);
    const RowSet val = gather_rows(embeddings, labels, masks.val);
    if (train.x.rows == 0) throw config_error("probe: empty train split");

    int num_classes = 0;
    for (int v : labels) num_classes = std::max(num_classes, v + 1);
    {
        std::vector<std::uint8_t> seen(static_cast<std::size_t>(num_classes), 0);
        for (int v : train.y) seen[static_cast<std::size_t>(v)] = 1;
        for (int c = 0; c < num_classes; ++c)
            if (!seen[static_cast<std::size_t>(c)])
                throw config_error("probe: class " + std::to_string(c) +
                                   " has no training examples");
    }

    const std::size_t d = embeddings.cols;
    const std::size_t cn = static_cast<std::size_t>(num_classes);
    const double n_train = static_cast<double>(train.x.rows);
    const double reg = lambda / n_train;

    Matrix w(d, cn);
    std::vector<double> b(cn, 0.0);
    Matrix best_w = w;
    std::vector<double> best_b = b;
    double best_val = accuracy_on(val.x, val.y, w, b);

    for (std::size_t it = 0; it < iters; ++it) {
        if (trace) trace->train_loss.push_back(objective(train.x, train.y, w, b, reg));

        Matrix p = logits_of(train.x, w, b);
        softmax_rows(p);
        for (std::size_t i = 0; i < p.rows; ++i)
            p(i, static_cast<std::size_t>(train.y[i])) -= 1.0;
        for (double& v : p.data) v /= n_train;

        Matrix gw = matmul_tn(train.x, p);
        for (std::size_t k = 0; k < gw.data.size(); ++k) gw.data[k] += reg * w.data[k];
        std::vector<double> gb = column_sums(p);
        for (std::size_t k = 0; k < gb.size(); ++k) gb[k] += reg * b[k];

        for (std::size_t k = 0; k < w.data.size(); ++k) w.data[k] -= lr * gw.data[k];
        for (std::size_t k = 0; k < b.size(); ++k) b[k] -= lr * gb[k];

        if ((it + 1) % 100 == 0 || it + 1 == iters) {
            const double acc = accuracy_on(val.x, val.y, w, b);
            if (acc > best_val) {
                best_val = acc;
                best_w = w;
                best_b = b;
            }
        }
    }

    if (val.x.rows == 0) {  // nothing to select on: keep the final iterate
        best_w = w;
        best_b = b;
    }

    ProbeModel m;
    m.w = std::move(best_w);
    m.b = std::move(best_b);
    m.lambda = lambda;
    m.iters = iters;
    return m;
}

std::vector<int> probe_predict(const ProbeModel& m, const Matrix& embeddings) {
    Matrix z = logits_of(embeddings, m.w, m.b);
    std::vector<int> pred(z.rows);
    for (std::size_t i = 0; i < z.rows; ++i) {
        const double* row = z.row(i);
        std::size_t best = 0;
        for (std::size_t j = 1; j < z.cols; ++j)
            if (row[j] > row[best]) best = j;
        pred[i] = static_cast<int>(best);
    }
    return pred;
}

double micro_f1(const std::vector<int>& predictions, const std::vector<int>& labels,
                const std::vector<std::uint8_t>& mask) {
    if (predictions.size() != labels.size() || mask.size() != labels.size())
        throw config_error("micro_f1: mismatched lengths");
    std::size_t total = 0, correct = 0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask[i]) continue;
        ++total;
        if (predictions[i] == labels[i]) ++correct;
    }
    if (total == 0) throw config_error("micro_f1: empty evaluation mask");
    return static_cast<double>(correct) / static_cast<double>(total);
}

void export_embeddings(const Matrix& embeddings, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open embedding output path: " + path);
    out << std::setprecision(17);
    for (std::size_t i = 0; i < embeddings.rows; ++i) {
        const double* row = embeddings.row(i);
        for (std::size_t j = 0; j < embeddings.cols; ++j) {
            if (j) out << ',';
            out << row[j];
        }
        out << '\n';
    }
    if (!out) throw config_error("failed while writing embeddings to " + path);
}

}  // namespace adngcl
