#ifndef AACLI_COMMANDS_HPP
#define AACLI_COMMANDS_HPP

#include <optional>
#include <string>
#include <vector>

#include "experiment_config.hpp"

namespace aacli {

struct CommandOptions {
    std::string out_dir;                                 // --out
    std::optional<OutputSpec::Format> format_override;   // --format
    bool quiet = false;                                  // --quiet
    int workers = 1;                                     // --workers (sweep)
    std::vector<std::string> checks;                     // --checks (audit)
};

// Exit codes: 0 success/converged/all-audits-pass, 1 usage or config error
// (including missing history for a requested audit), 2 solver failed to
// converge, 3 an audit failed.
int cmd_run(const std::string& config_path, const CommandOptions& opts);
int cmd_sweep(const std::string& config_path, const CommandOptions& opts);
int cmd_audit(const std::string& path, const CommandOptions& opts);

} // namespace aacli

#endif // AACLI_COMMANDS_HPP
