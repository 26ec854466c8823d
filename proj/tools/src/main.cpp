#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Anderson-accelerated fixed-point experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string audit_path;
    aacli::CommandOptions opts;
    std::string format;
    std::string checks_arg;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--out", opts.out_dir, "Directory for traces and summaries");
        cmd->add_option("--format", format, "Trace format override")
            ->check(CLI::IsMember({"csv", "json"}));
        cmd->add_flag("--quiet", opts.quiet, "Suppress the summary line/table");
    };

    auto* run = app.add_subcommand("run", "Run one experiment from a config file");
    run->add_option("config", config_path, "Experiment config (JSON)")->required();
    add_common(run);

    auto* sweep = app.add_subcommand("sweep", "Run a (m, beta, parameter) grid");
    sweep->add_option("config", config_path, "Experiment config with a sweep section")->required();
    sweep->add_option("--workers", opts.workers, "Concurrent cells")->check(CLI::PositiveNumber);
    add_common(sweep);

    auto* audit = app.add_subcommand("audit", "Audit a config (re-run) or a stored trace");
    audit->add_option("input", audit_path, "Config or trace file")->required();
    audit->add_option("--checks", checks_arg,
                      "Comma-separated audits: update_identity,gain_bound,lemma_m1,rate_envelope");
    add_common(audit);

    CLI11_PARSE(app, argc, argv);

    if (!format.empty()) {
        opts.format_override = format == "csv" ? aacli::OutputSpec::Format::Csv
                                               : aacli::OutputSpec::Format::Json;
    }
    if (!checks_arg.empty()) {
        std::size_t pos = 0;
        while (pos != std::string::npos) {
            const auto comma = checks_arg.find(',', pos);
            const auto item = checks_arg.substr(pos, comma == std::string::npos ? comma : comma - pos);
            if (!item.empty()) opts.checks.push_back(item);
            pos = comma == std::string::npos ? comma : comma + 1;
        }
    }

    if (run->parsed()) return aacli::cmd_run(config_path, opts);
    if (sweep->parsed()) return aacli::cmd_sweep(config_path, opts);
    return aacli::cmd_audit(audit_path, opts);
}
