#include "commands.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "aa/analysis.hpp"
#include "aa/errors.hpp"
#include "aa/solver.hpp"
#include "trace_io.hpp"

namespace fs = std::filesystem;

namespace aacli {

namespace {

std::string beta_label(const aa::DampingSchedule& d) {
    if (d.kind == aa::DampingSchedule::Kind::Adaptive) return "adaptive";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", d.beta);
    return buf;
}

std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string resolve_output_path(const OutputSpec& out, const std::string& out_dir) {
    if (out_dir.empty()) return out.trace_path;
    fs::create_directories(out_dir);
    return (fs::path(out_dir) / fs::path(out.trace_path).filename()).string();
}

std::optional<OutputSpec> effective_output(const ExperimentConfig& cfg, const CommandOptions& opts) {
    std::optional<OutputSpec> out = cfg.output;
    if (!out && !opts.out_dir.empty()) {
        OutputSpec def;
        def.format = opts.format_override.value_or(OutputSpec::Format::Csv);
        def.trace_path = def.format == OutputSpec::Format::Csv ? "trace.csv" : "trace.json";
        out = def;
    }
    if (out && opts.format_override) {
        out->format = *opts.format_override;
        // keep the extension in sync with an overridden format
        fs::path p(out->trace_path);
        p.replace_extension(out->format == OutputSpec::Format::Csv ? ".csv" : ".json");
        out->trace_path = p.string();
    }
    return out;
}

void write_trace(const ExperimentConfig& cfg, const OutputSpec& out, const std::string& path,
                 const aa::SolveReport& report) {
    if (out.format == OutputSpec::Format::Csv) {
        write_trace_csv(path, report);
    } else {
        write_trace_json(path, report, to_json(cfg));
    }
}

std::string classification_label(const aa::SolveReport& report) {
    if (!report.rate) return "none";
    return std::string(aa::to_string(report.rate->classification));
}

struct AuditPlan {
    aa::SolveReport report;
    std::optional<double> kappa; // for lemma/envelope audits
    bool has_vectors = true;
    std::string source; // description for messages
};

int run_audits(const AuditPlan& plan, std::vector<std::string> checks, bool quiet) {
    namespace analysis = aa::analysis;
    if (checks.empty()) {
        checks.push_back("gain_bound");
        if (plan.has_vectors && plan.report.config.depth_m >= 1) {
            checks.insert(checks.begin(), "update_identity");
            // contraction-based audits only run by default when a constant
            // is known or estimable
            if (plan.kappa) {
                if (plan.report.config.depth_m == 1) checks.push_back("lemma_m1");
                checks.push_back("rate_envelope");
            }
        }
    }

    auto need_kappa = [&](const char* what) -> double {
        if (plan.kappa) return *plan.kappa;
        throw aa::NotContractiveError(std::string(what) +
                                      ": no contraction constant available for this trace");
    };

    std::vector<analysis::AuditResult> results;
    for (const auto& name : checks) {
        if (name == "update_identity") {
            results.push_back(analysis::audit_update_identity(plan.report));
        } else if (name == "gain_bound") {
            results.push_back(analysis::audit_gain_bound(plan.report));
        } else if (name == "lemma_m1") {
            results.push_back(analysis::audit_lemma_m1(plan.report, need_kappa("lemma_m1")));
        } else if (name == "rate_envelope") {
            results.push_back(
                analysis::audit_rate_envelope(plan.report, need_kappa("rate_envelope"), true));
        } else {
            throw ConfigError("unknown audit '" + name +
                              "' (expected update_identity|gain_bound|lemma_m1|rate_envelope)");
        }
    }

    bool all_passed = true;
    if (!quiet) {
        std::printf("%-20s %14s %11s %7s %9s  %s\n", "audit", "worst_dev", "tolerance", "pass",
                    "location", "fitted_C");
    }
    for (const auto& r : results) {
        all_passed = all_passed && r.passed;
        if (!quiet) {
            std::printf("%-20s %14.4e %11.1e %7s %9d  %s\n", r.name.c_str(), r.worst_deviation,
                        r.tolerance, r.passed ? "yes" : "NO", r.location,
                        r.fitted_constant ? short_num(*r.fitted_constant).c_str() : "-");
        }
    }
    return all_passed ? 0 : 3;
}

} // namespace

int cmd_run(const std::string& config_path, const CommandOptions& opts) {
    ExperimentConfig cfg;
    aa::SolveReport report;
    std::string trace_path;
    try {
        cfg = load_config_file(config_path);
        const auto problem = cfg.problem.build();
        const auto x0 = resolve_x0(cfg, problem.dimension);
        report = aa::solve(problem, x0, cfg.anderson);

        if (const auto out = effective_output(cfg, opts)) {
            trace_path = resolve_output_path(*out, opts.out_dir);
            write_trace(cfg, *out, trace_path, report);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "run: %s\n", e.what());
        return 1;
    }

    if (!opts.quiet) {
        std::printf("run %s: status=%s iterations=%d final_residual=%s classification=%s%s%s\n",
                    report.problem_name.c_str(), std::string(aa::to_string(report.status)).c_str(),
                    report.iterations(), short_num(report.final_residual_norm()).c_str(),
                    classification_label(report).c_str(),
                    trace_path.empty() ? "" : " trace=", trace_path.c_str());
    }
    return report.status == aa::SolveStatus::Converged ? 0 : 2;
}

namespace {

struct Cell {
    ExperimentConfig cfg;
    std::string param_label; // problem-axis value, empty when no axis
    int index = 0;
};

struct CellOutcome {
    aa::SolveReport report;
    bool ok = false;
    std::string error;
};

std::vector<Cell> expand_cells(const ExperimentConfig& base) {
    const SweepAxes& axes = *base.sweep;

    // Problem-parameter axis (at most one applies per problem kind).
    struct ParamChoice {
        std::optional<double> kappa;
        std::optional<int> mesh;
        std::string label;
    };
    std::vector<ParamChoice> params;
    if (!axes.kappa.empty()) {
        if (base.problem.kind != ProblemSelector::Kind::Affine) {
            throw ConfigError("sweep.kappa requires an affine problem");
        }
        for (double k : axes.kappa) params.push_back({k, std::nullopt, "kappa=" + short_num(k)});
    } else if (!axes.mesh_n.empty()) {
        if (base.problem.kind != ProblemSelector::Kind::Quasilinear) {
            throw ConfigError("sweep.mesh_n requires a quasilinear problem");
        }
        for (int m : axes.mesh_n) params.push_back({std::nullopt, m, "mesh_n=" + std::to_string(m)});
    } else {
        params.push_back({std::nullopt, std::nullopt, ""});
    }

    std::vector<int> depths = axes.depth_m;
    if (depths.empty()) depths.push_back(base.anderson.depth_m);
    std::vector<aa::DampingSchedule> betas = axes.beta;
    if (betas.empty()) betas.push_back(base.anderson.damping);

    std::vector<Cell> cells;
    for (const auto& p : params) {
        for (int m : depths) {
            for (const auto& b : betas) {
                Cell cell;
                cell.cfg = base;
                cell.cfg.sweep.reset();
                if (p.kappa) cell.cfg.problem.affine_kappa = *p.kappa;
                if (p.mesh) cell.cfg.problem.quasilinear.mesh_n = *p.mesh;
                cell.cfg.anderson.depth_m = m;
                cell.cfg.anderson.damping = b;
                cell.param_label = p.label;
                cell.index = static_cast<int>(cells.size());
                cells.push_back(std::move(cell));
            }
        }
    }
    return cells;
}

CellOutcome run_cell(const Cell& cell) {
    CellOutcome out;
    try {
        cell.cfg.anderson.validate();
        const auto problem = cell.cfg.problem.build();
        const auto x0 = resolve_x0(cell.cfg, problem.dimension);
        out.report = aa::solve(problem, x0, cell.cfg.anderson);
        out.ok = true;
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

} // namespace

int cmd_sweep(const std::string& config_path, const CommandOptions& opts) {
    ExperimentConfig base;
    std::vector<Cell> cells;
    try {
        base = load_config_file(config_path);
        if (!base.sweep) throw ConfigError("config has no 'sweep' section");
        cells = expand_cells(base);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "sweep: %s\n", e.what());
        return 1;
    }

    std::vector<CellOutcome> outcomes(cells.size());
    const int workers = std::max(1, std::min<int>(opts.workers, static_cast<int>(cells.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < cells.size(); ++i) outcomes[i] = run_cell(cells[i]);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int t = 0; t < workers; ++t) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= cells.size()) break;
                    outcomes[i] = run_cell(cells[i]);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    // Per-cell traces, written after the runs in deterministic index order.
    int exit_code = 0;
    std::ostringstream summary;
    summary << "# aa-sweep v1\n";
    summary << "cell,param,m,beta,status,iterations,final_residual,classification\n";
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const Cell& cell = cells[i];
        const CellOutcome& out = outcomes[i];
        std::string status = "error";
        std::string iters = "F";
        std::string final_res;
        std::string cls = "none";
        if (out.ok) {
            status = std::string(aa::to_string(out.report.status));
            if (out.report.status == aa::SolveStatus::Converged) {
                iters = std::to_string(out.report.iterations());
            } else {
                exit_code = 2;
            }
            final_res = format_g17(out.report.final_residual_norm());
            cls = classification_label(out.report);

            if (cell.cfg.output) {
                auto out_spec = effective_output(cell.cfg, opts);
                char suffix[16];
                std::snprintf(suffix, sizeof(suffix), "_cell%03d", cell.index);
                fs::path p(out_spec->trace_path);
                p.replace_filename(p.stem().string() + suffix + p.extension().string());
                out_spec->trace_path = p.string();
                try {
                    write_trace(cell.cfg, *out_spec, resolve_output_path(*out_spec, opts.out_dir),
                                out.report);
                } catch (const std::exception& e) {
                    std::fprintf(stderr, "sweep: cell %d trace: %s\n", cell.index, e.what());
                }
            }
        } else {
            exit_code = 2;
        }
        summary << cell.index << ',' << cell.param_label << ',' << cell.cfg.anderson.depth_m << ','
                << beta_label(cell.cfg.anderson.damping) << ',' << status << ',' << iters << ','
                << final_res << ',' << cls << "\n";
        if (!out.ok) {
            std::fprintf(stderr, "sweep: cell %d failed: %s\n", cell.index, out.error.c_str());
        }
    }

    if (!opts.quiet) {
        std::fputs(summary.str().c_str(), stdout);
    }
    if (!opts.out_dir.empty()) {
        try {
            fs::create_directories(opts.out_dir);
            write_file_atomic((fs::path(opts.out_dir) / "sweep_summary.csv").string(), summary.str());
        } catch (const std::exception& e) {
            std::fprintf(stderr, "sweep: summary: %s\n", e.what());
            return 1;
        }
    }
    return exit_code;
}

int cmd_audit(const std::string& path, const CommandOptions& opts) {
    try {
        AuditPlan plan;
        std::vector<std::string> checks = opts.checks;

        std::ifstream probe(path, std::ios::binary);
        if (!probe) throw ConfigError("cannot open file: " + path);
        const char first = static_cast<char>(probe.peek());
        bool config_mode = false;
        nlohmann::json j;
        if (first == '{') {
            probe >> j;
            config_mode = !(j.contains("format") && j.value("format", "") == "aa-trace");
        }
        probe.close();

        if (config_mode) {
            const auto cfg = parse_config(j);
            const auto problem = cfg.problem.build();
            const auto x0 = resolve_x0(cfg, problem.dimension);
            plan.report = aa::solve(problem, x0, cfg.anderson);
            plan.kappa = problem.metadata.kappa;
            plan.has_vectors = true;
            plan.source = "config";
            if (checks.empty()) checks = cfg.audits;
        } else {
            auto loaded = load_trace(path);
            plan.report = std::move(loaded.report);
            plan.has_vectors = loaded.has_vectors;
            plan.source = "trace";
            if (loaded.experiment) {
                const auto cfg = parse_config(*loaded.experiment);
                const auto problem = cfg.problem.build();
                plan.report.inner_product = problem.inner_product;
                plan.kappa = problem.metadata.kappa;
                if (checks.empty()) checks = cfg.audits;
            }
        }

        if (!plan.kappa && plan.has_vectors && plan.report.steps.size() >= 2) {
            try {
                const double est = aa::analysis::estimate_kappa(plan.report);
                if (est < 1.0) plan.kappa = est;
            } catch (const aa::Error&) {
                // leave kappa unset; contraction audits will report the gap
            }
        }

        return run_audits(plan, std::move(checks), opts.quiet);
    } catch (const aa::InsufficientHistoryError& e) {
        std::fprintf(stderr, "audit: missing history: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "audit: %s\n", e.what());
        return 1;
    }
}

} // namespace aacli
