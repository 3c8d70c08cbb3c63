// End-to-end checks of the command-line binary. Each case shells out to the
// real executable (path injected by the build as ADNGCL_CLI_PATH), so these
// cover argument parsing, exit-code mapping, and artifact writing together.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef _WIN32
#include <sys/wait.h>
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

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
        dir = fs::temp_directory_path() / ("adngcl_cli_" + std::to_string(counter++));
        fs::create_directories(dir);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }
    fs::path operator/(const std::string& name) const { return dir / name; }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p);
    out << content;
}

// Run the CLI with the given argument string; returns the exit code and
// leaves combined stdout+stderr in `captured`.
int run_cli(const std::string& args, const TempDir& scratch, std::string* captured = nullptr) {
    const fs::path log = scratch / "cli_output.txt";
    const std::string cmd =
        std::string("\"") + ADNGCL_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int raw = std::system(cmd.c_str());
#ifdef _WIN32
    const int code = raw;
#else
    const int code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
#endif
    if (captured) *captured = slurp(log);
    return code;
}

fs::path write_tiny_config(const TempDir& scratch, const std::string& extra = "") {
    std::string text = kTinyConfig;
    if (!extra.empty()) {
        const auto brace = text.rfind('}');
        text = text.substr(0, brace) + ", " + extra + "\n}";
    }
    const fs::path p = scratch / "config.json";
    write_file(p, text);
    return p;
}

size_t count_lines(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    size_t n = 0;
    while (std::getline(in, line)) ++n;
    return n;
}

}  // namespace

TEST_CASE("cli: --help exits zero and prints usage") {
    TempDir scratch;
    std::string out;
    CHECK(run_cli("--help", scratch, &out) == 0);
    CHECK(out.find("train") != std::string::npos);
    CHECK(out.find("sweep-ratio") != std::string::npos);
}

TEST_CASE("cli: argument errors exit with the config-error code") {
    TempDir scratch;

    SUBCASE("no subcommand") { CHECK(run_cli("", scratch) == 2); }
    SUBCASE("unknown subcommand") { CHECK(run_cli("frobnicate", scratch) == 2); }
    SUBCASE("unknown flag") { CHECK(run_cli("train --frequency 9", scratch) == 2); }
    SUBCASE("missing required --config") { CHECK(run_cli("train", scratch) == 2); }
}

TEST_CASE("cli: config file problems exit with the config-error code") {
    TempDir scratch;
    std::string out;

    SUBCASE("nonexistent config path") {
        CHECK(run_cli("train --config /nonexistent/cfg.json", scratch, &out) == 2);
        CHECK(out.find("cannot open") != std::string::npos);
    }
    SUBCASE("config is not json") {
        const fs::path p = scratch / "bad.json";
        write_file(p, "not json at all");
        CHECK(run_cli("train --config \"" + p.string() + "\"", scratch, &out) == 2);
        CHECK(out.find("error") != std::string::npos);
    }
    SUBCASE("config fails validation") {
        const fs::path p = scratch / "bad.json";
        write_file(p, R"({"tau": -1.0})");
        CHECK(run_cli("train --config \"" + p.string() + "\"", scratch, &out) == 2);
        CHECK(out.find("tau") != std::string::npos);
    }
}

TEST_CASE("cli: train writes artifacts and prints the report") {
    TempDir scratch;
    const fs::path cfg = write_tiny_config(scratch);
    const fs::path out_dir = scratch / "run";

    std::string out;
    const int rc = run_cli("train --config \"" + cfg.string() + "\" --out \"" +
                               out_dir.string() + "\" --deterministic",
                           scratch, &out);
    REQUIRE(rc == 0);

    CHECK(fs::exists(out_dir / "report.json"));
    CHECK(fs::exists(out_dir / "metrics_seed1.jsonl"));
    CHECK(fs::exists(out_dir / "ledger_seed1.json"));

    // stdout carries the same report the file holds
    const auto printed = json::parse(out);
    const auto on_disk = json::parse(slurp(out_dir / "report.json"));
    CHECK(printed["micro_f1_mean"] == on_disk["micro_f1_mean"]);
    CHECK(printed["per_seed"][0]["seed"] == 1);

    // --deterministic zeroes every wall-clock field
    std::ifstream metrics(out_dir / "metrics_seed1.jsonl");
    std::string line;
    while (std::getline(metrics, line)) CHECK(json::parse(line)["time_ms"] == 0.0);
}

TEST_CASE("cli: --seed overrides the configured seed list") {
    TempDir scratch;
    const fs::path cfg = write_tiny_config(scratch);

    std::string out;
    const int rc =
        run_cli("train --config \"" + cfg.string() + "\" --seed 5 --deterministic", scratch, &out);
    REQUIRE(rc == 0);

    const auto report = json::parse(out);
    REQUIRE(report["per_seed"].size() == 1);
    CHECK(report["per_seed"][0]["seed"] == 5);

    SUBCASE("negative seed is rejected up front") {
        CHECK(run_cli("train --config \"" + cfg.string() + "\" --seed -3", scratch) == 2);
    }
}

TEST_CASE("cli: export-embeddings writes one row per node") {
    TempDir scratch;
    const fs::path cfg = write_tiny_config(scratch);
    const fs::path csv = scratch / "emb.csv";

    const int rc = run_cli("export-embeddings --config \"" + cfg.string() +
                               "\" --embeddings \"" + csv.string() + "\"",
                           scratch);
    REQUIRE(rc == 0);
    REQUIRE(fs::exists(csv));
    CHECK(count_lines(csv) == 120);

    // every row has the embedding width
    std::ifstream in(csv);
    std::string first;
    std::getline(in, first);
    size_t commas = 0;
    for (char c : first)
        if (c == ',') ++commas;
    CHECK(commas == 7);  // h = 8 columns
}

TEST_CASE("cli: plot converts a metrics file into csv series") {
    TempDir scratch;
    const fs::path cfg = write_tiny_config(scratch);
    const fs::path run_dir = scratch / "run";
    REQUIRE(run_cli("train --config \"" + cfg.string() + "\" --out \"" + run_dir.string() + "\"",
                    scratch) == 0);

    const fs::path plot_dir = scratch / "plots";
    const fs::path metrics = run_dir / "metrics_seed1.jsonl";
    CHECK(run_cli("plot \"" + metrics.string() + "\" --out \"" + plot_dir.string() + "\"",
                  scratch) == 0);
    CHECK(fs::exists(plot_dir / "negatives.csv"));
    CHECK(fs::exists(plot_dir / "epoch_time.csv"));
    CHECK(count_lines(plot_dir / "negatives.csv") == 31);  // header + one row per epoch

    SUBCASE("missing metrics file fails cleanly") {
        CHECK(run_cli("plot /nonexistent.jsonl --out \"" + plot_dir.string() + "\"", scratch) ==
              2);
    }
    SUBCASE("--out is required") {
        CHECK(run_cli("plot \"" + metrics.string() + "\"", scratch) == 2);
    }
}

TEST_CASE("cli: sweep-budget prints a table and writes per-budget runs") {
    TempDir scratch;
    const fs::path cfg = write_tiny_config(scratch, R"("sweep_thetas": [0.0, 0.5])");
    const fs::path out_dir = scratch / "sweep";

    std::string out;
    const int rc = run_cli("sweep-budget --config \"" + cfg.string() + "\" --out \"" +
                               out_dir.string() + "\" --deterministic",
                           scratch, &out);
    REQUIRE(rc == 0);
    CHECK(out.find("theta_max") != std::string::npos);
    CHECK(out.find("micro_f1_mean") != std::string::npos);
    CHECK(fs::exists(out_dir / "sweep_budget.json"));

    const auto rows = json::parse(slurp(out_dir / "sweep_budget.json"));
    REQUIRE(rows.size() == 2);
    CHECK(rows[0]["theta_max"] == 0.0);
    CHECK(rows[1]["theta_max"] == 0.5);
}

TEST_CASE("cli: sweep-ratio honours configured triples") {
    TempDir scratch;
    const fs::path cfg =
        write_tiny_config(scratch, R"("sweep_ratios": [[0.1, 0.3, 0.6]], "theta_max": 0.4)");
    const fs::path out_dir = scratch / "sweep";

    std::string out;
    const int rc = run_cli("sweep-ratio --config \"" + cfg.string() + "\" --out \"" +
                               out_dir.string() + "\" --deterministic",
                           scratch, &out);
    REQUIRE(rc == 0);
    CHECK(out.find("r_hard") != std::string::npos);
    CHECK(fs::exists(out_dir / "sweep_ratio.json"));
    CHECK(json::parse(slurp(out_dir / "sweep_ratio.json")).size() == 1);
}

TEST_CASE("cli: numerical blow-up during training exits with the runtime code") {
    TempDir scratch;
    // A pathological learning rate drives the weights to ~1e305 after one
    // update, so the next forward pass overflows and training must abort.
    const fs::path cfg = write_tiny_config(scratch, R"("lr": 1e305)");

    std::string out;
    const int rc = run_cli("train --config \"" + cfg.string() + "\"", scratch, &out);
    CHECK(rc == 3);
    CHECK(out.find("error") != std::string::npos);
}
