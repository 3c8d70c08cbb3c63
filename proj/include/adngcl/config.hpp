#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "adngcl/hans.hpp"

namespace adngcl {

// One flat JSON object drives a whole experiment; every key matches a field
// here (see README for the full key list). Unknown keys are rejected so
// ablation typos fail fast instead of silently running defaults.
struct RunConfig {
    // dataset: a directory takes precedence, otherwise a generated
    // planted-partition graph
    std::string dataset_dir;
    std::size_t sbm_n = 300;
    std::size_t sbm_num_classes = 3;
    double sbm_p_in = 0.10;
    double sbm_p_out = 0.01;
    std::size_t sbm_d = 32;
    double sbm_feature_shift = 1.0;
    std::uint64_t sbm_seed = 7;
    std::uint64_t split_seed = 0;  // splits stay fixed across training seeds

    // augmentation
    double p_e = 0.4;
    double p_f1 = 0.3;
    double p_f2 = 0.3;

    // model + optimizer
    std::size_t h = 128;
    std::size_t h_p = 64;
    double lr = 5e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double tau = 0.5;

    // scheduler (JSON keys: theta_max, r_easy/r_hard/r_inter, t_init,
    // t_interval, e, gamma, b, c_cat, eta_floor, swap_interval)
    HansConfig hans;

    std::uint64_t epochs = 2000;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

    // evaluation probe
    double probe_lambda = 1e-4;
    double probe_lr = 0.05;
    std::size_t probe_iters = 2000;
    bool probe_projector_output = false;

    // loss variants
    bool intra_view_negatives = false;
    bool literal_eq8 = false;

    bool deterministic = false;
    std::string out_dir;

    // sweep rows; ratio triples are written (easy, hard, inter)
    std::vector<std::array<double, 3>> sweep_ratios = {
        {0.1, 0.1, 0.8}, {0.1, 0.2, 0.7}, {0.1, 0.3, 0.6}, {0.2, 0.3, 0.5},
        {0.3, 0.3, 0.4}, {0.1, 0.4, 0.5}, {0.25, 0.25, 0.5}, {0.2, 0.1, 0.7},
        {0.2, 0.2, 0.6}, {0.3, 0.1, 0.6}, {0.3, 0.2, 0.5}};
    std::vector<double> sweep_thetas = {0.0, 0.25, 0.5, 1.0};

    void validate() const;  // throws config_error

    static RunConfig from_json_text(const std::string& text);
    static RunConfig from_json_file(const std::string& path);
};

}  // namespace adngcl
