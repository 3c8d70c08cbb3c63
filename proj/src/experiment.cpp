#include "adngcl/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "adngcl/augment.hpp"
#include "adngcl/contrastive.hpp"
#include "adngcl/errors.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

namespace adngcl {

Graph load_or_generate(const RunConfig& cfg) {
    if (!cfg.dataset_dir.empty()) return load_graph(cfg.dataset_dir);
    return generate_sbm(cfg.sbm_n, cfg.sbm_num_classes, cfg.sbm_p_in, cfg.sbm_p_out, cfg.sbm_d,
                        cfg.sbm_feature_shift, cfg.sbm_seed);
}

namespace {

using clock_type = std::chrono::steady_clock;

double ms_between(clock_type::time_point a, clock_type::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
}

}  // namespace

TrainOutcome train_single(const RunConfig& cfg, const Graph& g, const SplitMasks& masks,
                          std::uint64_t seed) {
    const std::size_t n = g.num_nodes;
    AugmentConfig aug{cfg.p_e, cfg.p_f1, cfg.p_f2, seed};
    HansConfig hc = cfg.hans;
    hc.seed = seed;
    AdamConfig adam{cfg.lr, cfg.beta1, cfg.beta2, cfg.eps};
    LossOptions lopt{.literal_eq8 = cfg.literal_eq8,
                     .intra_view_negatives = cfg.intra_view_negatives};

    ModelParams params = init_params(g.num_features(), cfg.h, cfg.h_p, seed);
    BudgetLedger ledger = warmup_state(hc);
    NegativePools pools;
    ActiveNegatives active(n);

    TrainOutcome out;
    out.seed = seed;
    out.records.reserve(cfg.epochs);
    double total_ms = 0.0;

    for (std::uint64_t t = 1; t <= cfg.epochs; ++t) {
        try {
            auto [v1, v2] = make_views(g, aug, t);
            const NormAdj adj1 = normalize_adj(v1.edges, n);
            const NormAdj adj2 = normalize_adj(v2.edges, n);
            const ForwardCache c1 = forward(params, adj1, v1.features);
            const ForwardCache c2 = forward(params, adj2, v2.features);

            const auto t0 = clock_type::now();
            const PairContext ctx = make_pair_context(c1.h, c2.h, cfg.tau);

            if (t == 1 || t % hc.t_interval == 0) {
                SimRowFn sim_row = [&ctx, n](std::size_t i, std::vector<double>& row) {
                    row.resize(n);
                    const double* ui = ctx.u1.row(i);
                    for (std::size_t j = 0; j < n; ++j)
                        row[j] = dot(ui, ctx.u2.row(j), ctx.u1.cols);
                };
                pools = stratify(sim_row, n, hc.ratios);
                active = draw_active(pools, ledger, hc, t);
            } else {
                bool stale = false;
                for (std::size_t c = 0; c < num_categories && !stale; ++c) {
                    const std::size_t expect = expected_active_count(
                        ledger, static_cast<Category>(c), n, pools.pool_size(static_cast<Category>(c)));
                    const std::size_t have =
                        active.sets[c].empty() ? 0 : active.sets[c][0].size();
                    stale = expect != have;
                }
                if (stale) {
                    active = draw_active(pools, ledger, hc, t);
                } else if (ledger.saturated && t % hc.swap_interval == 0) {
                    active = swap_active(pools, active, ledger, hc, t);
                }
            }

            const std::array<double, num_categories> eta_used = ledger.eta;
            const LossResult lres = info_nce_loss(ctx, active, lopt);
            const Gradients grads =
                backward(params, adj1, adj2, c1, c2, lres.dh1, lres.dh2);
            scheduler_tick(ledger, hc, t, lres.per_category);
            const auto t1 = clock_type::now();
            adam_step(params, grads, adam);

            EpochRecord rec;
            rec.epoch = t;
            rec.loss = lres.loss;
            rec.cat_loss = lres.per_category;
            rec.eta = eta_used;
            for (std::size_t c = 0; c < num_categories; ++c)
                rec.active_total[c] = active.total_count(static_cast<Category>(c));
            const double ms = ms_between(t0, t1);
            total_ms += ms;
            rec.time_ms = cfg.deterministic ? 0.0 : ms;
            out.records.push_back(rec);
        } catch (const numeric_error& e) {
            throw numeric_error("epoch " + std::to_string(t) + ": " + e.what());
        }
    }

    Matrix emb;
    if (cfg.probe_projector_output) {
        const NormAdj adj = normalize_adj(g.edges, n);
        emb = forward(params, adj, g.features).h;
    } else {
        emb = final_embeddings(params, g);
    }
    const ProbeModel probe = train_probe(emb, g.labels, masks, cfg.probe_lambda,
                                         cfg.probe_iters, cfg.probe_lr, seed);
    const auto pred = probe_predict(probe, emb);
    out.test_f1 = micro_f1(pred, g.labels, masks.test);
    out.val_f1 = micro_f1(pred, g.labels, masks.val);
    out.mean_epoch_ms = total_ms / static_cast<double>(cfg.epochs);
    out.params = std::move(params);
    out.ledger = std::move(ledger);
    return out;
}

namespace {

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw config_error("cannot create output directory " + dir + ": " + ec.message());
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open output file: " + path);
    out << text;
    if (!out) throw config_error("failed while writing " + path);
}

std::string record_line(const EpochRecord& r) {
    ordered_json j;
    j["epoch"] = r.epoch;
    j["loss"] = r.loss;
    j["loss_hard"] = r.cat_loss[cat_hard];
    j["loss_inter"] = r.cat_loss[cat_inter];
    j["loss_easy"] = r.cat_loss[cat_easy];
    j["eta_hard"] = r.eta[cat_hard];
    j["eta_inter"] = r.eta[cat_inter];
    j["eta_easy"] = r.eta[cat_easy];
    j["active_hard"] = r.active_total[cat_hard];
    j["active_inter"] = r.active_total[cat_inter];
    j["active_easy"] = r.active_total[cat_easy];
    j["time_ms"] = r.time_ms;
    return j.dump();
}

void write_metrics(const std::string& path, const std::vector<EpochRecord>& records) {
    std::ostringstream ss;
    for (const auto& r : records) ss << record_line(r) << '\n';
    write_text(path, ss.str());
}

}  // namespace

MultiSeedReport run_training(const RunConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    const Graph g = load_or_generate(cfg);
    const SplitMasks masks = make_splits(g, cfg.split_seed);
    if (!out_dir.empty()) ensure_dir(out_dir);

    MultiSeedReport rep;
    rep.zero_budget = cfg.hans.theta_max == 0.0;
    double ms_sum = 0.0;
    for (std::uint64_t seed : cfg.seeds) {
        TrainOutcome o = train_single(cfg, g, masks, seed);
        rep.per_seed.emplace_back(seed, o.test_f1);
        ms_sum += o.mean_epoch_ms;
        if (!out_dir.empty()) {
            const std::string tag = "_seed" + std::to_string(seed);
            write_metrics(out_dir + "/metrics" + tag + ".jsonl", o.records);
            write_text(out_dir + "/ledger" + tag + ".json", ledger_to_json(o.ledger) + "\n");
        }
    }

    const double k = static_cast<double>(rep.per_seed.size());
    double mean = 0.0;
    for (const auto& [s, f1] : rep.per_seed) mean += f1;
    mean /= k;
    double var = 0.0;
    for (const auto& [s, f1] : rep.per_seed) var += (f1 - mean) * (f1 - mean);
    rep.f1_mean = mean;
    rep.f1_std = std::sqrt(var / k);
    rep.mean_epoch_ms = ms_sum / k;

    if (!out_dir.empty()) write_text(out_dir + "/report.json", report_to_json(rep) + "\n");
    return rep;
}

namespace {

std::string ratio_tag(const std::array<double, 3>& r) {
    auto pct = [](double v) { return std::to_string(std::lround(v * 100.0)); };
    return pct(r[0]) + "-" + pct(r[1]) + "-" + pct(r[2]);
}

std::string theta_tag(double th) {
    std::ostringstream ss;
    ss << "theta_" << th;
    return ss.str();
}

}  // namespace

std::vector<RatioSweepRow> run_ratio_sweep(const RunConfig& cfg, const std::string& out_dir) {
    if (!out_dir.empty()) ensure_dir(out_dir);
    std::vector<RatioSweepRow> rows;
    for (const auto& r : cfg.sweep_ratios) {
        RunConfig c = cfg;
        c.hans.ratios = make_ratios(r[0], r[1], r[2]);
        const std::string sub = out_dir.empty() ? "" : out_dir + "/ratio_" + ratio_tag(r);
        const MultiSeedReport rep = run_training(c, sub);
        rows.push_back({r, rep.f1_mean, rep.f1_std});
    }
    if (!out_dir.empty())
        write_text(out_dir + "/sweep_ratio.json", ratio_sweep_to_json(rows) + "\n");
    return rows;
}

std::vector<BudgetSweepRow> run_budget_sweep(const RunConfig& cfg, const std::string& out_dir) {
    if (!out_dir.empty()) ensure_dir(out_dir);
    std::vector<BudgetSweepRow> rows;
    for (double th : cfg.sweep_thetas) {
        RunConfig c = cfg;
        c.hans.theta_max = th;
        const std::string sub = out_dir.empty() ? "" : out_dir + "/" + theta_tag(th);
        const MultiSeedReport rep = run_training(c, sub);
        rows.push_back({th, rep.f1_mean, rep.f1_std, rep.mean_epoch_ms});
    }
    if (!out_dir.empty())
        write_text(out_dir + "/sweep_budget.json", budget_sweep_to_json(rows) + "\n");
    return rows;
}

void emit_plots(const std::string& metrics_path, const std::string& out_dir) {
    std::ifstream in(metrics_path);
    if (!in) throw config_error("cannot open metrics file: " + metrics_path);

    std::ostringstream negatives, times;
    negatives << "epoch,active_hard,active_inter,active_easy\n";
    times << "epoch,time_ms\n";

    std::string line;
    std::size_t count = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
            negatives << j.at("epoch").get<std::uint64_t>() << ','
                      << j.at("active_hard").get<std::uint64_t>() << ','
                      << j.at("active_inter").get<std::uint64_t>() << ','
                      << j.at("active_easy").get<std::uint64_t>() << '\n';
            times << j.at("epoch").get<std::uint64_t>() << ','
                  << j.at("time_ms").get<double>() << '\n';
        } catch (const json::exception& e) {
            throw config_error("corrupt metrics line in " + metrics_path + ": " + e.what());
        }
        ++count;
    }
    if (count == 0) throw config_error("metrics file has no records: " + metrics_path);

    ensure_dir(out_dir);
    write_text(out_dir + "/negatives.csv", negatives.str());
    write_text(out_dir + "/epoch_time.csv", times.str());
}

std::string report_to_json(const MultiSeedReport& r) {
    ordered_json j;
    j["micro_f1_mean"] = r.f1_mean;
    j["micro_f1_std"] = r.f1_std;
    ordered_json seeds = ordered_json::array();
    for (const auto& [seed, f1] : r.per_seed) {
        ordered_json row;
        row["seed"] = seed;
        row["micro_f1"] = f1;
        seeds.push_back(row);
    }
    j["per_seed"] = seeds;
    j["mean_epoch_time_ms"] = r.mean_epoch_ms;
    j["degenerate_zero_budget"] = r.zero_budget;
    if (r.zero_budget)
        j["note"] = "theta_max = 0 schedules no negatives; the loss is identically zero and "
                    "the encoder stays at its random initialization";
    return j.dump(2);
}

std::string ratio_sweep_to_json(const std::vector<RatioSweepRow>& rows) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : rows) {
        ordered_json j;
        j["r_easy"] = r.ratios[0];
        j["r_hard"] = r.ratios[1];
        j["r_inter"] = r.ratios[2];
        j["micro_f1_mean"] = r.f1_mean;
        j["micro_f1_std"] = r.f1_std;
        arr.push_back(j);
    }
    return arr.dump(2);
}

std::string budget_sweep_to_json(const std::vector<BudgetSweepRow>& rows) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : rows) {
        ordered_json j;
        j["theta_max"] = r.theta_max;
        j["micro_f1_mean"] = r.f1_mean;
        j["micro_f1_std"] = r.f1_std;
        j["mean_epoch_time_ms"] = r.mean_epoch_ms;
        arr.push_back(j);
    }
    return arr.dump(2);
}

}  // namespace adngcl
