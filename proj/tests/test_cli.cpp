#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>
#include <json.hpp>

#include "aa/analysis.hpp"
#include "aa/solver.hpp"
#include "commands.hpp"
#include "experiment_config.hpp"
#include "trace_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path test_dir() {
    const auto dir = fs::temp_directory_path() / "aa_cli_tests";
    fs::create_directories(dir);
    return dir;
}

std::string write_file(const std::string& name, const std::string& content) {
    const auto path = test_dir() / name;
    std::ofstream out(path);
    out << content;
    return path.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kFpp1M1Config = R"({
  "problem": {"kind": "scalar", "name": "fpp1"},
  "anderson": {"depth_m": 1, "damping": {"kind": "constant", "beta": 1.0},
               "residual_tol": 1e-12, "max_iters": 30},
  "x0": "default",
  "output": {"trace_path": "fpp1_m1.csv", "format": "csv"}
})";

} // namespace

TEST_CASE("config round-trips through serialization losslessly") {
    std::vector<std::string> sources = {
        kFpp1M1Config,
        R"({"problem": {"kind": "affine", "dimension": 6, "kappa": 0.35, "seed": 99},
            "anderson": {"depth_m": 3, "damping": {"kind": "adaptive"}, "residual_tol": 1e-9,
                         "max_iters": 500, "divergence_guard": 1e8,
                         "history_policy": "flush_until_m", "rank_drop_tol": 1e-9},
            "x0": "zero",
            "audits": ["gain_bound", "update_identity"],
            "sweep": {"depth_m": [0, 1], "beta": [1.0, 0.8, "adaptive"], "kappa": [0.3, 0.6]}})",
        R"({"problem": {"kind": "quasilinear", "mesh_n": 256, "k_coef": 1.05, "u0_coef": 0.4,
                        "epsilon": 0.2, "exact_amp": 5.0, "mass_weighted_inner_product": true},
            "x0": [0.5, 0.5, 0.5],
            "output": {"trace_path": "t.json", "format": "json"}})",
    };
    for (const auto& src : sources) {
        const auto cfg = aacli::parse_config(json::parse(src));
        const json round1 = aacli::to_json(cfg);
        const auto cfg2 = aacli::parse_config(round1);
        const json round2 = aacli::to_json(cfg2);
        CHECK(round1 == round2);
    }
}

TEST_CASE("config parsing rejects malformed input") {
    CHECK_THROWS_AS(aacli::parse_config(json::parse(R"({"problem": {"kind": "scalar",
        "name": "fpp1"}, "typo_key": 1})")), aacli::ConfigError);
    CHECK_THROWS_AS(aacli::parse_config(json::parse(R"({"problem": {"kind": "other"}})")),
                    aacli::ConfigError);
    CHECK_THROWS_AS(aacli::parse_config(json::parse(R"({"problem": {"kind": "scalar",
        "name": "fpp1"}, "anderson": {"depth_m": -2}})")), aacli::ConfigError);
    CHECK_THROWS_AS(aacli::parse_config(json::parse(R"({"problem": {"kind": "affine",
        "dimension": 3, "kappa": 1.5}})")), aacli::ConfigError);
    // residual_tol >= divergence_guard
    CHECK_THROWS_AS(aacli::parse_config(json::parse(R"({"problem": {"kind": "scalar",
        "name": "fpp1"}, "anderson": {"residual_tol": 1.0, "divergence_guard": 0.5}})")),
                    aacli::ConfigError);
}

TEST_CASE("x0 resolution") {
    auto cfg = aacli::parse_config(json::parse(kFpp1M1Config));
    CHECK(aacli::resolve_x0(cfg, 1) == aa::Vector{2.1});
    cfg.x0.kind = aacli::X0Spec::Kind::Zero;
    CHECK(aacli::resolve_x0(cfg, 1) == aa::Vector{0.0});
    cfg.x0.kind = aacli::X0Spec::Kind::Values;
    cfg.x0.values = {1.0, 2.0};
    CHECK_THROWS_AS(aacli::resolve_x0(cfg, 1), aacli::ConfigError);
}

TEST_CASE("cmd_run writes byte-identical traces across repeated runs") {
    const auto config_path = write_file("det.json", kFpp1M1Config);
    aacli::CommandOptions opts;
    opts.quiet = true;

    opts.out_dir = (test_dir() / "det_a").string();
    REQUIRE(aacli::cmd_run(config_path, opts) == 0);
    opts.out_dir = (test_dir() / "det_b").string();
    REQUIRE(aacli::cmd_run(config_path, opts) == 0);

    const auto a = slurp((test_dir() / "det_a" / "fpp1_m1.csv").string());
    const auto b = slurp((test_dir() / "det_b" / "fpp1_m1.csv").string());
    CHECK(!a.empty());
    CHECK(a == b);
    CHECK(a.rfind("# aa-trace v1\n", 0) == 0);
    CHECK(a.find("# status: converged") != std::string::npos);
}

TEST_CASE("exit codes follow the contract") {
    aacli::CommandOptions opts;
    opts.quiet = true;

    SUBCASE("convergence exits 0") {
        const auto path = write_file("ok.json", kFpp1M1Config);
        opts.out_dir = (test_dir() / "ok_out").string(); // keep the trace out of the cwd
        CHECK(aacli::cmd_run(path, opts) == 0);
    }
    SUBCASE("divergence exits 2") {
        const auto path = write_file("div.json", R"({
            "problem": {"kind": "scalar", "name": "fpp3"},
            "anderson": {"depth_m": 0, "residual_tol": 1e-12, "max_iters": 50},
            "x0": "default"})");
        CHECK(aacli::cmd_run(path, opts) == 2);
    }
    SUBCASE("malformed config exits 1 and writes no trace") {
        const auto out = test_dir() / "no_trace";
        fs::remove_all(out);
        const auto path = write_file("bad.json", R"({"problem": {"kind": "scalar"
            , "name": "fpp1", "bogus": 3}})");
        opts.out_dir = out.string();
        CHECK(aacli::cmd_run(path, opts) == 1);
        CHECK(!fs::exists(out / "trace.csv"));
    }
}

TEST_CASE("JSON traces reload with full fidelity") {
    const auto config_path = write_file("fidelity.json", std::string(kFpp1M1Config));
    auto cfg = aacli::load_config_file(config_path);
    const auto problem = cfg.problem.build();
    const auto report = aa::solve(problem, aacli::resolve_x0(cfg, 1), cfg.anderson);

    const auto trace_path = (test_dir() / "fidelity_trace.json").string();
    aacli::write_trace_json(trace_path, report, aacli::to_json(cfg));
    const auto loaded = aacli::load_trace(trace_path);

    REQUIRE(loaded.has_vectors);
    REQUIRE(loaded.report.steps.size() == report.steps.size());
    for (std::size_t i = 0; i < report.steps.size(); ++i) {
        CHECK(loaded.report.steps[i].residual_norm == report.steps[i].residual_norm);
        CHECK(loaded.report.steps[i].theta == report.steps[i].theta);
        CHECK(loaded.report.steps[i].alpha == report.steps[i].alpha);
        CHECK(loaded.report.steps[i].accepted == report.steps[i].accepted);
        CHECK(loaded.report.steps[i].residual == report.steps[i].residual);
    }

    // the reloaded trace supports the same audits with the same outcomes
    const auto a1 = aa::analysis::audit_update_identity(report);
    const auto a2 = aa::analysis::audit_update_identity(loaded.report);
    CHECK(a1.worst_deviation == a2.worst_deviation);
    CHECK(a2.passed);
}

TEST_CASE("cmd_audit distinguishes trace capabilities") {
    const auto config_path = write_file("audit_cfg.json", kFpp1M1Config);
    aacli::CommandOptions opts;
    opts.quiet = true;
    opts.out_dir = (test_dir() / "audit_out").string();
    REQUIRE(aacli::cmd_run(config_path, opts) == 0);

    const auto csv_path = (test_dir() / "audit_out" / "fpp1_m1.csv").string();

    SUBCASE("config input: full audit set passes") {
        CHECK(aacli::cmd_audit(config_path, opts) == 0);
    }
    SUBCASE("CSV input: scalar audits pass") {
        CHECK(aacli::cmd_audit(csv_path, opts) == 0);
    }
    SUBCASE("CSV input: vector audits are refused") {
        opts.checks = {"update_identity"};
        CHECK(aacli::cmd_audit(csv_path, opts) == 1);
    }
    SUBCASE("tampered theta fails the gain audit with exit 3") {
        auto content = slurp(csv_path);
        const auto pos = content.find("\n3,");
        REQUIRE(pos != std::string::npos);
        const auto comma1 = content.find(',', pos + 1);
        const auto comma2 = content.find(',', comma1 + 1);
        const auto comma3 = content.find(',', comma2 + 1);
        content.replace(comma2 + 1, comma3 - comma2 - 1, "1.5");
        const auto tampered = write_file("tampered.csv", content);
        opts.checks = {"gain_bound"};
        CHECK(aacli::cmd_audit(tampered, opts) == 3);
    }
    SUBCASE("depth-0 trace with the identity audit requested exits 1") {
        const auto m0_cfg = write_file("m0.json", R"({
            "problem": {"kind": "scalar", "name": "fpp1"},
            "anderson": {"depth_m": 0, "residual_tol": 1e-12, "max_iters": 60},
            "x0": "default",
            "output": {"trace_path": "m0.json", "format": "json"}})");
        REQUIRE(aacli::cmd_run(m0_cfg, opts) == 0);
        opts.checks = {"update_identity"};
        CHECK(aacli::cmd_audit((test_dir() / "audit_out" / "m0.json").string(), opts) == 1);
    }
}

TEST_CASE("cmd_sweep covers the grid and aggregates exit codes") {
    aacli::CommandOptions opts;
    opts.quiet = true;

    SUBCASE("affine grid: iteration counts grow with kappa at depth 0") {
        const auto path = write_file("sweep.json", R"({
            "problem": {"kind": "affine", "dimension": 5, "kappa": 0.5, "seed": 42},
            "anderson": {"residual_tol": 1e-10, "max_iters": 300},
            "x0": "zero",
            "sweep": {"depth_m": [0], "kappa": [0.3, 0.6, 0.9], "beta": [1.0]}})");
        opts.out_dir = (test_dir() / "sweep_out").string();
        opts.workers = 3;
        CHECK(aacli::cmd_sweep(path, opts) == 0);

        const auto summary = slurp((test_dir() / "sweep_out" / "sweep_summary.csv").string());
        CHECK(summary.rfind("# aa-sweep v1\n", 0) == 0);
        std::vector<int> iters;
        std::istringstream ss(summary);
        std::string line;
        while (std::getline(ss, line)) {
            if (line.empty() || line[0] == '#' || line.rfind("cell,", 0) == 0) continue;
            std::istringstream cells(line);
            std::string field;
            for (int i = 0; i < 6; ++i) std::getline(cells, field, ',');
            iters.push_back(std::stoi(field));
        }
        REQUIRE(iters.size() == 3);
        CHECK(iters[0] < iters[1]);
        CHECK(iters[1] < iters[2]);
    }

    SUBCASE("sweep summaries are identical regardless of worker count") {
        const auto path = write_file("sweep_det.json", R"({
            "problem": {"kind": "affine", "dimension": 4, "kappa": 0.5, "seed": 7},
            "anderson": {"residual_tol": 1e-10, "max_iters": 200},
            "x0": "zero",
            "sweep": {"depth_m": [0, 1, 2], "beta": [1.0, 0.7]}})");
        opts.out_dir = (test_dir() / "sweep_w1").string();
        opts.workers = 1;
        REQUIRE(aacli::cmd_sweep(path, opts) == 0);
        opts.out_dir = (test_dir() / "sweep_w4").string();
        opts.workers = 4;
        REQUIRE(aacli::cmd_sweep(path, opts) == 0);
        CHECK(slurp((test_dir() / "sweep_w1" / "sweep_summary.csv").string()) ==
              slurp((test_dir() / "sweep_w4" / "sweep_summary.csv").string()));
    }

    SUBCASE("a failing cell yields exit 2 and an F entry without aborting the sweep") {
        const auto path = write_file("sweep_fail.json", R"({
            "problem": {"kind": "scalar", "name": "fpp3"},
            "anderson": {"residual_tol": 1e-10, "max_iters": 50},
            "x0": "default",
            "sweep": {"depth_m": [0, 1], "beta": [1.0]}})");
        opts.out_dir = (test_dir() / "sweep_fail_out").string();
        CHECK(aacli::cmd_sweep(path, opts) == 2);
        const auto summary = slurp((test_dir() / "sweep_fail_out" / "sweep_summary.csv").string());
        CHECK(summary.find(",diverged,F,") != std::string::npos);   // depth 0 cell
        CHECK(summary.find(",converged,") != std::string::npos);    // depth 1 cell
    }

    SUBCASE("config without a sweep section exits 1") {
        const auto path = write_file("nosweep.json", kFpp1M1Config);
        CHECK(aacli::cmd_sweep(path, opts) == 1);
    }

    SUBCASE("a single-cell grid reproduces the plain run's trace") {
        const auto run_cfg = write_file("single_run.json", R"({
            "problem": {"kind": "affine", "dimension": 4, "kappa": 0.5, "seed": 9},
            "anderson": {"depth_m": 2, "residual_tol": 1e-10, "max_iters": 100},
            "x0": "zero",
            "output": {"trace_path": "single.csv", "format": "csv"}})");
        const auto sweep_cfg = write_file("single_sweep.json", R"({
            "problem": {"kind": "affine", "dimension": 4, "kappa": 0.5, "seed": 9},
            "anderson": {"depth_m": 2, "residual_tol": 1e-10, "max_iters": 100},
            "x0": "zero",
            "output": {"trace_path": "single.csv", "format": "csv"},
            "sweep": {"depth_m": [2]}})");
        opts.out_dir = (test_dir() / "single_out").string();
        REQUIRE(aacli::cmd_run(run_cfg, opts) == 0);
        REQUIRE(aacli::cmd_sweep(sweep_cfg, opts) == 0);
        CHECK(slurp((test_dir() / "single_out" / "single.csv").string()) ==
              slurp((test_dir() / "single_out" / "single_cell000.csv").string()));
    }
}

TEST_CASE("quasilinear damping sweep marks the undamped plain cell as F") {
    const auto path = write_file("ql_sweep.json", R"({
        "problem": {"kind": "quasilinear", "mesh_n": 1024},
        "anderson": {"residual_tol": 1e-5, "max_iters": 200,
                     "history_policy": "flush_until_m"},
        "x0": "zero",
        "sweep": {"depth_m": [0, 1, 2, 4, 6, 8],
                  "beta": [1.0, 0.8, 0.6, "adaptive"]}})");
    aacli::CommandOptions opts;
    opts.quiet = true;
    opts.workers = 2;
    opts.out_dir = (test_dir() / "ql_sweep_out").string();
    CHECK(aacli::cmd_sweep(path, opts) == 2); // the m=0, beta=1 cell fails

    const auto summary = slurp((test_dir() / "ql_sweep_out" / "sweep_summary.csv").string());
    std::istringstream ss(summary);
    std::string line;
    int converged = 0;
    bool m0_beta1_failed = false;
    while (std::getline(ss, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("cell,", 0) == 0) continue;
        if (line.find(",0,1,") != std::string::npos) {
            m0_beta1_failed = line.find(",F,") != std::string::npos;
        }
        if (line.find(",converged,") != std::string::npos) ++converged;
    }
    CHECK(m0_beta1_failed);
    // every depth >= 4 cell converges, with and without damping
    CHECK(converged >= 12);
}
