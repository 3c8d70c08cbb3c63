// Command-line front end. Deliberately thin: everything below the argument
// parsing goes through the C API of libadngcl, so this file doubles as a
// usage example for language bindings.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "adngcl.h"

namespace {

constexpr int exit_config_error = 2;

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    long long seed = -1;
    bool deterministic = false;
};

void add_common(CLI::App* sub, CommonArgs& args, bool config_required) {
    auto* opt = sub->add_option("--config", args.config_path, "run config (JSON)");
    if (config_required) opt->required();
    sub->add_option("--seed", args.seed, "run a single seed instead of the configured list")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--out", args.out_dir, "output directory");
    sub->add_flag("--deterministic", args.deterministic,
                  "zero wall-clock fields so metrics files are byte-stable");
}

// Engine construction shared by every training-style subcommand.
adngcl_engine* make_engine(const CommonArgs& args) {
    std::ifstream in(args.config_path);
    if (!in) {
        std::cerr << "error: cannot open config file: " << args.config_path << "\n";
        return nullptr;
    }
    std::ostringstream ss;
    ss << in.rdbuf();

    char errbuf[1024] = {0};
    adngcl_engine* engine = adngcl_engine_new(ss.str().c_str(), errbuf, sizeof errbuf);
    if (!engine) {
        std::cerr << "error: " << errbuf << "\n";
        return nullptr;
    }
    if (args.seed >= 0 && adngcl_engine_override_seed(engine, args.seed) != ADNGCL_OK) {
        std::cerr << "error: " << adngcl_engine_last_error(engine) << "\n";
        adngcl_engine_free(engine);
        return nullptr;
    }
    if (args.deterministic) adngcl_engine_set_deterministic(engine, 1);
    return engine;
}

int finish(adngcl_engine* engine, int rc, bool print_report = true) {
    if (rc == ADNGCL_OK) {
        if (print_report) std::cout << adngcl_engine_last_report(engine) << "\n";
    } else {
        std::cerr << "error: " << adngcl_engine_last_error(engine) << "\n";
    }
    adngcl_engine_free(engine);
    return rc;
}

// Render a sweep report (a JSON array of uniform objects) as an aligned
// text table for quick reading; the JSON itself is already on disk.
void print_table(const std::string& report_json) {
    const auto rows = nlohmann::json::parse(report_json, nullptr, false);
    if (!rows.is_array() || rows.empty()) return;
    for (const auto& [key, val] : rows[0].items()) std::printf("%18s", key.c_str());
    std::printf("\n");
    for (const auto& row : rows) {
        for (const auto& [key, val] : row.items())
            std::printf("%18s", val.dump().c_str());
        std::printf("\n");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"contrastive graph embedding trainer with scheduled negative sampling"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string embeddings_path;
    std::string metrics_path;

    auto* cmd_train = app.add_subcommand("train", "multi-seed training run");
    add_common(cmd_train, args, true);

    auto* cmd_ratio =
        app.add_subcommand("sweep-ratio", "one training run per configured ratio triple");
    add_common(cmd_ratio, args, true);

    auto* cmd_budget =
        app.add_subcommand("sweep-budget", "one training run per configured budget value");
    add_common(cmd_budget, args, true);

    auto* cmd_export =
        app.add_subcommand("export-embeddings", "train one seed and dump node embeddings");
    add_common(cmd_export, args, true);
    cmd_export->add_option("--embeddings", embeddings_path,
                           "output CSV path (default <out>/embeddings.csv)");

    auto* cmd_plot = app.add_subcommand("plot", "turn a metrics JSONL file into CSV series");
    cmd_plot->add_option("metrics", metrics_path, "metrics_seed<k>.jsonl from a training run")
        ->required();
    cmd_plot->add_option("--out", args.out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return exit_config_error;
    }

    if (cmd_plot->parsed()) {
        char errbuf[1024] = {0};
        const int rc =
            adngcl_plot_metrics(metrics_path.c_str(), args.out_dir.c_str(), errbuf, sizeof errbuf);
        if (rc != ADNGCL_OK) std::cerr << "error: " << errbuf << "\n";
        return rc;
    }

    adngcl_engine* engine = make_engine(args);
    if (!engine) return exit_config_error;

    if (cmd_train->parsed())
        return finish(engine, adngcl_engine_train(engine, args.out_dir.c_str()));

    if (cmd_ratio->parsed()) {
        const int rc = adngcl_engine_sweep_ratio(engine, args.out_dir.c_str());
        if (rc == ADNGCL_OK) print_table(adngcl_engine_last_report(engine));
        return finish(engine, rc, /*print_report=*/false);
    }

    if (cmd_budget->parsed()) {
        const int rc = adngcl_engine_sweep_budget(engine, args.out_dir.c_str());
        if (rc == ADNGCL_OK) print_table(adngcl_engine_last_report(engine));
        return finish(engine, rc, /*print_report=*/false);
    }

    if (cmd_export->parsed()) {
        std::string path = embeddings_path;
        if (path.empty())
            path = (args.out_dir.empty() ? "." : args.out_dir) + "/embeddings.csv";
        return finish(engine, adngcl_engine_export_embeddings(engine, path.c_str()));
    }

    return exit_config_error;  // unreachable: a subcommand is required
}
