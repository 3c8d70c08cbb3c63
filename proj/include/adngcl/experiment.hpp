#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "adngcl/config.hpp"
#include "adngcl/eval.hpp"
#include "adngcl/graph.hpp"
#include "adngcl/hans.hpp"
#include "adngcl/neuralnet.hpp"

namespace adngcl {

struct EpochRecord {
    std::uint64_t epoch = 0;
    double loss = 0.0;
    std::array<double, num_categories> cat_loss{};
    std::array<double, num_categories> eta{};
    std::array<std::size_t, num_categories> active_total{};  // summed over anchors
    double time_ms = 0.0;  // scheduling + loss + backward region
};

struct TrainOutcome {
    std::uint64_t seed = 0;
    double test_f1 = 0.0;
    double val_f1 = 0.0;
    double mean_epoch_ms = 0.0;
    ModelParams params;
    BudgetLedger ledger;
    std::vector<EpochRecord> records;
};

struct MultiSeedReport {
    double f1_mean = 0.0;
    double f1_std = 0.0;  // population
    std::vector<std::pair<std::uint64_t, double>> per_seed;
    double mean_epoch_ms = 0.0;
    bool zero_budget = false;  // theta_max = 0 runs never train; the report says so
};

struct RatioSweepRow {
    std::array<double, 3> ratios;  // (easy, hard, inter)
    double f1_mean = 0.0;
    double f1_std = 0.0;
};

struct BudgetSweepRow {
    double theta_max = 0.0;
    double f1_mean = 0.0;
    double f1_std = 0.0;
    double mean_epoch_ms = 0.0;
};

// Dataset directory if configured, generated planted-partition graph
// otherwise.
Graph load_or_generate(const RunConfig& cfg);

// One full training run for one seed: epoch loop, probe, metrics records.
TrainOutcome train_single(const RunConfig& cfg, const Graph& g, const SplitMasks& masks,
                          std::uint64_t seed);

// All configured seeds; when out_dir is nonempty writes metrics_seed<k>.jsonl,
// ledger_seed<k>.json and report.json into it.
MultiSeedReport run_training(const RunConfig& cfg, const std::string& out_dir);

// One multi-seed run per ratio triple / budget value. Artifacts land in
// per-row subdirectories of out_dir plus a sweep summary JSON.
std::vector<RatioSweepRow> run_ratio_sweep(const RunConfig& cfg, const std::string& out_dir);
std::vector<BudgetSweepRow> run_budget_sweep(const RunConfig& cfg, const std::string& out_dir);

// Reads one metrics JSONL file and writes negatives.csv (active counts per
// category over epochs) and epoch_time.csv next to out_dir.
void emit_plots(const std::string& metrics_path, const std::string& out_dir);

std::string report_to_json(const MultiSeedReport& r);
std::string ratio_sweep_to_json(const std::vector<RatioSweepRow>& rows);
std::string budget_sweep_to_json(const std::vector<BudgetSweepRow>& rows);

}  // namespace adngcl
