#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "adngcl.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Engine handle with scope cleanup.
struct EngineGuard {
    adngcl_engine* e = nullptr;
    explicit EngineGuard(const char* cfg, char* err = nullptr, size_t cap = 0) {
        e = adngcl_engine_new(cfg, err, cap);
    }
    ~EngineGuard() { adngcl_engine_free(e); }
    operator adngcl_engine*() const { return e; }
};

const char* kTinyConfig = R"({
    "sbm_n": 120, "sbm_num_classes": 3, "sbm_p_in": 0.2, "sbm_p_out": 0.02,
    "sbm_d": 8, "sbm_feature_shift": 1.0, "sbm_seed": 7,
    "h": 8, "h_p": 4,
    "t_init": 10, "t_interval": 5, "e": 5, "swap_interval": 5,
    "epochs": 30, "seeds": [1], "probe_iters": 60
})";

struct TempDir {
    fs::path dir;
    TempDir() {
        static int counter = 0;
        dir = fs::temp_directory_path() / ("adngcl_capi_" + std::to_string(counter++));
        fs::create_directories(dir);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }
};

}  // namespace

TEST_CASE("version string is present") {
    const char* v = adngcl_version();
    REQUIRE(v != nullptr);
    CHECK(std::strlen(v) >= 5);  // at least x.y.z
}

TEST_CASE("engine_new rejects invalid configs through the error buffer") {
    char err[256] = {0};

    SUBCASE("unparseable json") {
        adngcl_engine* e = adngcl_engine_new("{oops", err, sizeof err);
        CHECK(e == nullptr);
        CHECK(std::strlen(err) > 0);
    }
    SUBCASE("unknown key") {
        adngcl_engine* e = adngcl_engine_new(R"({"not_a_key": 1})", err, sizeof err);
        CHECK(e == nullptr);
        CHECK(std::string(err).find("not_a_key") != std::string::npos);
    }
    SUBCASE("null config") {
        adngcl_engine* e = adngcl_engine_new(nullptr, err, sizeof err);
        CHECK(e == nullptr);
    }
    SUBCASE("truncation respects errcap") {
        char tiny[8] = {0};
        adngcl_engine* e = adngcl_engine_new("{oops", tiny, sizeof tiny);
        CHECK(e == nullptr);
        CHECK(std::strlen(tiny) < sizeof tiny);
    }
}

TEST_CASE("train produces a report with per-seed scores") {
    EngineGuard e(kTinyConfig);
    REQUIRE(e.e != nullptr);

    TempDir out;
    const int rc = adngcl_engine_train(e, out.dir.string().c_str());
    REQUIRE(rc == ADNGCL_OK);
    CHECK(std::strlen(adngcl_engine_last_error(e)) == 0);

    json report = json::parse(adngcl_engine_last_report(e));
    CHECK(report.contains("micro_f1_mean"));
    CHECK(report["per_seed"].size() == 1);
    CHECK(report["per_seed"][0]["seed"].get<int>() == 1);
    CHECK(fs::exists(out.dir / "report.json"));
    CHECK(fs::exists(out.dir / "metrics_seed1.jsonl"));
}

TEST_CASE("override_seed replaces the configured seed list") {
    EngineGuard e(kTinyConfig);
    REQUIRE(e.e != nullptr);

    CHECK(adngcl_engine_override_seed(e, 42) == ADNGCL_OK);
    CHECK(adngcl_engine_override_seed(e, -1) == ADNGCL_ERR_CONFIG);
    CHECK(std::strlen(adngcl_engine_last_error(e)) > 0);

    const int rc = adngcl_engine_train(e, nullptr);  // no out_dir: in-memory only
    REQUIRE(rc == ADNGCL_OK);
    json report = json::parse(adngcl_engine_last_report(e));
    REQUIRE(report["per_seed"].size() == 1);
    CHECK(report["per_seed"][0]["seed"].get<int>() == 42);
}

TEST_CASE("deterministic flag zeroes recorded epoch times") {
    EngineGuard e(kTinyConfig);
    REQUIRE(e.e != nullptr);
    CHECK(adngcl_engine_set_deterministic(e, 1) == ADNGCL_OK);

    TempDir out;
    REQUIRE(adngcl_engine_train(e, out.dir.string().c_str()) == ADNGCL_OK);

    std::ifstream metrics(out.dir / "metrics_seed1.jsonl");
    std::string line;
    while (std::getline(metrics, line)) {
        json j = json::parse(line);
        CHECK(j["time_ms"].get<double>() == 0.0);
    }
}

TEST_CASE("export_embeddings writes one row per node") {
    EngineGuard e(kTinyConfig);
    REQUIRE(e.e != nullptr);

    TempDir out;
    const auto csv = out.dir / "emb.csv";
    REQUIRE(adngcl_engine_export_embeddings(e, csv.string().c_str()) == ADNGCL_OK);

    json report = json::parse(adngcl_engine_last_report(e));
    CHECK(report["rows"].get<int>() == 120);
    CHECK(report["cols"].get<int>() == 8);  // encoder width h

    std::ifstream in(csv);
    REQUIRE(in.good());
    std::size_t rows = 0;
    std::string line;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 120);
}

TEST_CASE("sweeps run through the C surface") {
    // Shrink the sweep lists so this stays a unit test.
    std::string cfg = kTinyConfig;
    cfg.pop_back();  // drop '}'
    while (cfg.back() == '\n' || cfg.back() == ' ') cfg.pop_back();
    cfg += R"(, "sweep_ratios": [[0.1, 0.3, 0.6]], "sweep_thetas": [0.5]})";

    EngineGuard e(cfg.c_str());
    REQUIRE(e.e != nullptr);

    TempDir out;
    REQUIRE(adngcl_engine_sweep_ratio(e, out.dir.string().c_str()) == ADNGCL_OK);
    json ratio_table = json::parse(adngcl_engine_last_report(e));
    REQUIRE(ratio_table.size() == 1);
    CHECK(ratio_table[0].contains("micro_f1_mean"));

    TempDir out2;
    REQUIRE(adngcl_engine_sweep_budget(e, out2.dir.string().c_str()) == ADNGCL_OK);
    json budget_table = json::parse(adngcl_engine_last_report(e));
    REQUIRE(budget_table.size() == 1);
    CHECK(budget_table[0]["theta_max"].get<double>() == doctest::Approx(0.5));
}

TEST_CASE("config errors surface as ADNGCL_ERR_CONFIG at call time") {
    // Valid parse-time config whose dataset directory is missing at run time.
    EngineGuard e(R"({"dataset_dir": "/nonexistent_dataset_xyz", "epochs": 90})");
    REQUIRE(e.e != nullptr);
    const int rc = adngcl_engine_train(e, nullptr);
    CHECK(rc == ADNGCL_ERR_CONFIG);
    CHECK(std::strlen(adngcl_engine_last_error(e)) > 0);
}

TEST_CASE("null engine arguments are config errors, not crashes") {
    CHECK(adngcl_engine_train(nullptr, nullptr) == ADNGCL_ERR_CONFIG);
    CHECK(adngcl_engine_override_seed(nullptr, 1) == ADNGCL_ERR_CONFIG);
    CHECK(adngcl_engine_set_deterministic(nullptr, 1) == ADNGCL_ERR_CONFIG);
    CHECK(adngcl_engine_export_embeddings(nullptr, "x.csv") == ADNGCL_ERR_CONFIG);
    adngcl_engine_free(nullptr);  // must be a no-op
}

TEST_CASE("plot conversion works engine-free") {
    // Produce a metrics file first.
    EngineGuard e(kTinyConfig);
    REQUIRE(e.e != nullptr);
    TempDir run;
    REQUIRE(adngcl_engine_train(e, run.dir.string().c_str()) == ADNGCL_OK);

    TempDir plots;
    char err[256] = {0};
    const int rc = adngcl_plot_metrics((run.dir / "metrics_seed1.jsonl").string().c_str(),
                                       plots.dir.string().c_str(), err, sizeof err);
    REQUIRE(rc == ADNGCL_OK);
    CHECK(fs::exists(plots.dir / "negatives.csv"));
    CHECK(fs::exists(plots.dir / "epoch_time.csv"));

    const int bad = adngcl_plot_metrics("/nonexistent_metrics.jsonl",
                                        plots.dir.string().c_str(), err, sizeof err);
    CHECK(bad == ADNGCL_ERR_CONFIG);
    CHECK(std::strlen(err) > 0);
}
