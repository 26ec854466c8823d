#ifndef AACLI_TRACE_IO_HPP
#define AACLI_TRACE_IO_HPP

#include <optional>
#include <string>

#include <json.hpp>

#include "aa/report.hpp"

namespace aacli {

/// 17-significant-digit decimal form; round-trips doubles exactly.
std::string format_g17(double v);

/// Versioned CSV trace: one row per iteration with columns
/// k, residual_norm, theta, beta, alpha_0..alpha_m (empty when absent),
/// followed by a summary footer.  Deterministic byte-for-byte for a given
/// report.  Written atomically (temp file + rename).
void write_trace_csv(const std::string& path, const aa::SolveReport& report);

/// Full-fidelity JSON trace including per-step vectors, coefficients and the
/// experiment echo needed to re-run audits offline.
void write_trace_json(const std::string& path, const aa::SolveReport& report,
                      const nlohmann::json& experiment_echo);

struct LoadedTrace {
    aa::SolveReport report;
    std::optional<nlohmann::json> experiment; // present for JSON traces
    bool has_vectors = false;
};

/// Reads either trace format back; CSV traces carry scalars only.
LoadedTrace load_trace(const std::string& path);

void write_file_atomic(const std::string& path, const std::string& content);

} // namespace aacli

#endif // AACLI_TRACE_IO_HPP
