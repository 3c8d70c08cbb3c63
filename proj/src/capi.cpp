#include "adngcl.h"

#include <cstring>
#include <string>

#include <json.hpp>

#include "adngcl/errors.hpp"
#include "adngcl/experiment.hpp"

using ordered_json = nlohmann::ordered_json;

struct adngcl_engine {
    adngcl::RunConfig cfg;
    std::string last_error;
    std::string last_report;
};

namespace {

void fill_buf(char* buf, size_t cap, const std::string& msg) {
    if (!buf || cap == 0) return;
    const size_t len = std::min(msg.size(), cap - 1);
    std::memcpy(buf, msg.data(), len);
    buf[len] = '\0';
}

template <typename Fn>
int guarded(adngcl_engine* engine, Fn&& fn) {
    if (!engine) return ADNGCL_ERR_CONFIG;
    engine->last_error.clear();
    try {
        fn();
        return ADNGCL_OK;
    } catch (const adngcl::config_error& e) {
        engine->last_error = e.what();
        return ADNGCL_ERR_CONFIG;
    } catch (const adngcl::numeric_error& e) {
        engine->last_error = e.what();
        return ADNGCL_ERR_RUNTIME;
    } catch (const std::exception& e) {
        engine->last_error = e.what();
        return ADNGCL_ERR_RUNTIME;
    }
}

std::string resolve_out(const adngcl_engine* engine, const char* out_dir) {
    if (out_dir && *out_dir) return out_dir;
    return engine->cfg.out_dir;
}

}  // namespace

extern "C" {

const char* adngcl_version(void) { return "0.1.0"; }

adngcl_engine* adngcl_engine_new(const char* config_json, char* errbuf, size_t errcap) {
    try {
        auto* engine = new adngcl_engine;
        engine->cfg = adngcl::RunConfig::from_json_text(config_json ? config_json : "");
        return engine;
    } catch (const std::exception& e) {
        fill_buf(errbuf, errcap, e.what());
        return nullptr;
    }
}

void adngcl_engine_free(adngcl_engine* engine) { delete engine; }

const char* adngcl_engine_last_error(const adngcl_engine* engine) {
    return engine ? engine->last_error.c_str() : "null engine";
}

const char* adngcl_engine_last_report(const adngcl_engine* engine) {
    return engine ? engine->last_report.c_str() : "";
}

int adngcl_engine_override_seed(adngcl_engine* engine, long long seed) {
    return guarded(engine, [&] {
        if (seed < 0) throw adngcl::config_error("seed must be nonnegative");
        engine->cfg.seeds = {static_cast<std::uint64_t>(seed)};
    });
}

int adngcl_engine_set_deterministic(adngcl_engine* engine, int on) {
    return guarded(engine, [&] { engine->cfg.deterministic = on != 0; });
}

int adngcl_engine_train(adngcl_engine* engine, const char* out_dir) {
    return guarded(engine, [&] {
        const auto rep = adngcl::run_training(engine->cfg, resolve_out(engine, out_dir));
        engine->last_report = adngcl::report_to_json(rep);
    });
}

int adngcl_engine_sweep_ratio(adngcl_engine* engine, const char* out_dir) {
    return guarded(engine, [&] {
        const auto rows = adngcl::run_ratio_sweep(engine->cfg, resolve_out(engine, out_dir));
        engine->last_report = adngcl::ratio_sweep_to_json(rows);
    });
}

int adngcl_engine_sweep_budget(adngcl_engine* engine, const char* out_dir) {
    return guarded(engine, [&] {
        const auto rows = adngcl::run_budget_sweep(engine->cfg, resolve_out(engine, out_dir));
        engine->last_report = adngcl::budget_sweep_to_json(rows);
    });
}

int adngcl_engine_export_embeddings(adngcl_engine* engine, const char* csv_path) {
    return guarded(engine, [&] {
        if (!csv_path || !*csv_path)
            throw adngcl::config_error("export needs an output path");
        const adngcl::Graph g = adngcl::load_or_generate(engine->cfg);
        const adngcl::SplitMasks masks = adngcl::make_splits(g, engine->cfg.split_seed);
        const auto outcome =
            adngcl::train_single(engine->cfg, g, masks, engine->cfg.seeds.front());
        const adngcl::Matrix emb = adngcl::final_embeddings(outcome.params, g);
        adngcl::export_embeddings(emb, csv_path);

        ordered_json j;
        j["seed"] = outcome.seed;
        j["path"] = csv_path;
        j["rows"] = emb.rows;
        j["cols"] = emb.cols;
        j["test_micro_f1"] = outcome.test_f1;
        engine->last_report = j.dump(2);
    });
}

int adngcl_plot_metrics(const char* metrics_path, const char* out_dir, char* errbuf,
                        size_t errcap) {
    try {
        if (!metrics_path || !out_dir)
            throw adngcl::config_error("plot needs a metrics path and an output directory");
        adngcl::emit_plots(metrics_path, out_dir);
        return ADNGCL_OK;
    } catch (const adngcl::config_error& e) {
        fill_buf(errbuf, errcap, e.what());
        return ADNGCL_ERR_CONFIG;
    } catch (const std::exception& e) {
        fill_buf(errbuf, errcap, e.what());
        return ADNGCL_ERR_RUNTIME;
    }
}

}  // extern "C"
