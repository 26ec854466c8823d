#ifndef AACLI_EXPERIMENT_CONFIG_HPP
#define AACLI_EXPERIMENT_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "aa/config.hpp"
#include "aa/problem.hpp"
#include "aa/problems/quasilinear.hpp"
#include "aa/problems/scalar.hpp"

namespace aacli {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ProblemSelector {
    enum class Kind { Scalar, Affine, Quasilinear };

    Kind kind = Kind::Scalar;
    aa::problems::ScalarProblemKind scalar_kind = aa::problems::ScalarProblemKind::FPP1;
    int affine_dimension = 4;
    double affine_kappa = 0.5;
    std::uint64_t affine_seed = 1;
    aa::problems::QuasilinearSpec quasilinear{};

    aa::FixedPointProblem build() const;
};

struct X0Spec {
    enum class Kind { Default, Zero, Values };
    Kind kind = Kind::Default;
    aa::Vector values;
};

struct OutputSpec {
    enum class Format { Csv, Json };
    std::string trace_path;
    Format format = Format::Csv;
};

struct SweepAxes {
    std::vector<int> depth_m;
    std::vector<aa::DampingSchedule> beta;
    std::vector<double> kappa;  // affine problems only
    std::vector<int> mesh_n;    // quasilinear problems only
};

struct ExperimentConfig {
    ProblemSelector problem;
    aa::AndersonConfig anderson;
    X0Spec x0;
    std::optional<OutputSpec> output;
    std::vector<std::string> audits;
    std::optional<SweepAxes> sweep;
};

/// Strict schema-validated parse; throws ConfigError on unknown keys, type
/// mismatches or out-of-range values.
ExperimentConfig parse_config(const nlohmann::json& j);

/// Inverse of parse_config: parse(to_json(c)) == c for every valid config.
nlohmann::json to_json(const ExperimentConfig& c);

ExperimentConfig load_config_file(const std::string& path);

/// Starting iterate: explicit values, zeros, or the problem's canonical start
/// (the documented x0 for the scalar problems, zeros otherwise).
aa::Vector resolve_x0(const ExperimentConfig& c, int dimension);

} // namespace aacli

#endif // AACLI_EXPERIMENT_CONFIG_HPP
