#include "experiment_config.hpp"

#include <fstream>

#include "aa/problems/affine.hpp"

namespace aacli {

using nlohmann::json;

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* context) {
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* a : allowed) {
            if (item.key() == a) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            throw ConfigError(std::string("unknown key '") + item.key() + "' in " + context);
        }
    }
}

double get_number(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw ConfigError(std::string(key) + " must be a number");
    return j[key].get<double>();
}

int get_int(const json& j, const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_integer()) throw ConfigError(std::string(key) + " must be an integer");
    return j[key].get<int>();
}

aa::DampingSchedule parse_damping(const json& j) {
    if (j.is_string() && j.get<std::string>() == "adaptive") {
        return aa::DampingSchedule::adaptive();
    }
    if (j.is_number()) {
        return aa::DampingSchedule::constant(j.get<double>());
    }
    if (j.is_object()) {
        check_keys(j, {"kind", "beta"}, "damping");
        const std::string kind = j.value("kind", "constant");
        if (kind == "adaptive") {
            return aa::DampingSchedule::adaptive();
        }
        if (kind == "constant") {
            return aa::DampingSchedule::constant(get_number(j, "beta", 1.0));
        }
        throw ConfigError("damping.kind must be 'constant' or 'adaptive', got '" + kind + "'");
    }
    throw ConfigError("damping must be a number, 'adaptive', or an object");
}

json damping_to_json(const aa::DampingSchedule& d) {
    json j;
    if (d.kind == aa::DampingSchedule::Kind::Adaptive) {
        j["kind"] = "adaptive";
    } else {
        j["kind"] = "constant";
        j["beta"] = d.beta;
    }
    return j;
}

ProblemSelector parse_problem(const json& j) {
    if (!j.is_object()) throw ConfigError("problem must be an object");
    ProblemSelector p;
    const std::string kind = j.value("kind", "");
    if (kind == "scalar") {
        check_keys(j, {"kind", "name"}, "problem");
        const std::string name = j.value("name", "");
        if (name == "fpp1") p.scalar_kind = aa::problems::ScalarProblemKind::FPP1;
        else if (name == "fpp2") p.scalar_kind = aa::problems::ScalarProblemKind::FPP2;
        else if (name == "fpp3") p.scalar_kind = aa::problems::ScalarProblemKind::FPP3;
        else throw ConfigError("problem.name must be fpp1|fpp2|fpp3, got '" + name + "'");
        p.kind = ProblemSelector::Kind::Scalar;
    } else if (kind == "affine") {
        check_keys(j, {"kind", "dimension", "kappa", "seed"}, "problem");
        p.kind = ProblemSelector::Kind::Affine;
        p.affine_dimension = get_int(j, "dimension", 4);
        p.affine_kappa = get_number(j, "kappa", 0.5);
        if (j.contains("seed")) p.affine_seed = j["seed"].get<std::uint64_t>();
        if (p.affine_dimension < 1) throw ConfigError("problem.dimension must be >= 1");
        if (!(p.affine_kappa > 0.0 && p.affine_kappa < 1.0)) {
            throw ConfigError("problem.kappa must lie in (0, 1)");
        }
    } else if (kind == "quasilinear") {
        check_keys(j, {"kind", "mesh_n", "k_coef", "u0_coef", "epsilon", "exact_amp",
                       "mass_weighted_inner_product"}, "problem");
        p.kind = ProblemSelector::Kind::Quasilinear;
        p.quasilinear.mesh_n = get_int(j, "mesh_n", 1024);
        p.quasilinear.k_coef = get_number(j, "k_coef", 1.01);
        p.quasilinear.u0_coef = get_number(j, "u0_coef", 0.5);
        p.quasilinear.epsilon = get_number(j, "epsilon", 0.1);
        p.quasilinear.exact_amp = get_number(j, "exact_amp", 10.0);
        p.quasilinear.mass_weighted_inner_product = j.value("mass_weighted_inner_product", false);
        try {
            p.quasilinear.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    } else {
        throw ConfigError("problem.kind must be scalar|affine|quasilinear, got '" + kind + "'");
    }
    return p;
}

json problem_to_json(const ProblemSelector& p) {
    json j;
    switch (p.kind) {
        case ProblemSelector::Kind::Scalar:
            j["kind"] = "scalar";
            j["name"] = aa::problems::scalar_name(p.scalar_kind);
            break;
        case ProblemSelector::Kind::Affine:
            j["kind"] = "affine";
            j["dimension"] = p.affine_dimension;
            j["kappa"] = p.affine_kappa;
            j["seed"] = p.affine_seed;
            break;
        case ProblemSelector::Kind::Quasilinear:
            j["kind"] = "quasilinear";
            j["mesh_n"] = p.quasilinear.mesh_n;
            j["k_coef"] = p.quasilinear.k_coef;
            j["u0_coef"] = p.quasilinear.u0_coef;
            j["epsilon"] = p.quasilinear.epsilon;
            j["exact_amp"] = p.quasilinear.exact_amp;
            j["mass_weighted_inner_product"] = p.quasilinear.mass_weighted_inner_product;
            break;
    }
    return j;
}

aa::AndersonConfig parse_anderson(const json& j) {
    aa::AndersonConfig c;
    c.residual_tol = 1e-10;
    if (j.is_null()) return c;
    if (!j.is_object()) throw ConfigError("anderson must be an object");
    check_keys(j, {"depth_m", "damping", "residual_tol", "max_iters", "divergence_guard",
                   "history_policy", "rank_drop_tol"}, "anderson");
    c.depth_m = get_int(j, "depth_m", 0);
    if (j.contains("damping")) c.damping = parse_damping(j["damping"]);
    c.residual_tol = get_number(j, "residual_tol", c.residual_tol);
    c.max_iters = get_int(j, "max_iters", c.max_iters);
    c.divergence_guard = get_number(j, "divergence_guard", c.divergence_guard);
    c.rank_drop_tol = get_number(j, "rank_drop_tol", c.rank_drop_tol);
    if (j.contains("history_policy")) {
        const std::string p = j["history_policy"].get<std::string>();
        if (p == "truncate_min_km") c.history_policy = aa::HistoryPolicy::TruncateMinKM;
        else if (p == "flush_until_m") c.history_policy = aa::HistoryPolicy::FlushUntilM;
        else throw ConfigError("history_policy must be truncate_min_km|flush_until_m");
    }
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return c;
}

json anderson_to_json(const aa::AndersonConfig& c) {
    json j;
    j["depth_m"] = c.depth_m;
    j["damping"] = damping_to_json(c.damping);
    j["residual_tol"] = c.residual_tol;
    j["max_iters"] = c.max_iters;
    j["divergence_guard"] = c.divergence_guard;
    j["history_policy"] = c.history_policy == aa::HistoryPolicy::TruncateMinKM
                              ? "truncate_min_km"
                              : "flush_until_m";
    j["rank_drop_tol"] = c.rank_drop_tol;
    return j;
}

X0Spec parse_x0(const json& j) {
    X0Spec x;
    if (j.is_null()) return x;
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "default") x.kind = X0Spec::Kind::Default;
        else if (s == "zero") x.kind = X0Spec::Kind::Zero;
        else throw ConfigError("x0 must be 'default', 'zero' or an array of numbers");
        return x;
    }
    if (j.is_array()) {
        x.kind = X0Spec::Kind::Values;
        for (const auto& v : j) {
            if (!v.is_number()) throw ConfigError("x0 entries must be numbers");
            x.values.push_back(v.get<double>());
        }
        if (x.values.empty()) throw ConfigError("x0 array must be non-empty");
        return x;
    }
    throw ConfigError("x0 must be 'default', 'zero' or an array of numbers");
}

json x0_to_json(const X0Spec& x) {
    switch (x.kind) {
        case X0Spec::Kind::Default: return json("default");
        case X0Spec::Kind::Zero: return json("zero");
        case X0Spec::Kind::Values: return json(x.values);
    }
    return json("default");
}

OutputSpec parse_output(const json& j) {
    if (!j.is_object()) throw ConfigError("output must be an object");
    check_keys(j, {"trace_path", "format"}, "output");
    OutputSpec o;
    o.trace_path = j.value("trace_path", "");
    if (o.trace_path.empty()) throw ConfigError("output.trace_path must be non-empty");
    const std::string f = j.value("format", "csv");
    if (f == "csv") o.format = OutputSpec::Format::Csv;
    else if (f == "json") o.format = OutputSpec::Format::Json;
    else throw ConfigError("output.format must be csv|json");
    return o;
}

SweepAxes parse_sweep(const json& j) {
    if (!j.is_object()) throw ConfigError("sweep must be an object");
    check_keys(j, {"depth_m", "beta", "kappa", "mesh_n"}, "sweep");
    SweepAxes s;
    if (j.contains("depth_m")) {
        for (const auto& v : j["depth_m"]) s.depth_m.push_back(v.get<int>());
    }
    if (j.contains("beta")) {
        for (const auto& v : j["beta"]) s.beta.push_back(parse_damping(v));
    }
    if (j.contains("kappa")) {
        for (const auto& v : j["kappa"]) s.kappa.push_back(v.get<double>());
    }
    if (j.contains("mesh_n")) {
        for (const auto& v : j["mesh_n"]) s.mesh_n.push_back(v.get<int>());
    }
    if (s.depth_m.empty() && s.beta.empty() && s.kappa.empty() && s.mesh_n.empty()) {
        throw ConfigError("sweep must declare at least one axis");
    }
    return s;
}

json sweep_to_json(const SweepAxes& s) {
    json j;
    if (!s.depth_m.empty()) j["depth_m"] = s.depth_m;
    if (!s.beta.empty()) {
        json arr = json::array();
        for (const auto& b : s.beta) {
            if (b.kind == aa::DampingSchedule::Kind::Adaptive) arr.push_back("adaptive");
            else arr.push_back(b.beta);
        }
        j["beta"] = arr;
    }
    if (!s.kappa.empty()) j["kappa"] = s.kappa;
    if (!s.mesh_n.empty()) j["mesh_n"] = s.mesh_n;
    return j;
}

} // namespace

aa::FixedPointProblem ProblemSelector::build() const {
    switch (kind) {
        case Kind::Scalar:
            return aa::problems::make_scalar_problem(scalar_kind);
        case Kind::Affine:
            return aa::problems::make_affine_problem(
                aa::problems::make_affine(affine_dimension, affine_kappa, affine_seed));
        case Kind::Quasilinear:
            return aa::problems::make_quasilinear_problem(quasilinear);
    }
    throw ConfigError("unreachable problem kind");
}

ExperimentConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config root must be an object");
    check_keys(j, {"problem", "anderson", "x0", "output", "audits", "sweep"}, "config");
    if (!j.contains("problem")) throw ConfigError("config requires a 'problem' section");

    ExperimentConfig c;
    c.problem = parse_problem(j["problem"]);
    c.anderson = parse_anderson(j.contains("anderson") ? j["anderson"] : json());
    c.x0 = parse_x0(j.contains("x0") ? j["x0"] : json());
    if (j.contains("output")) c.output = parse_output(j["output"]);
    if (j.contains("audits")) {
        if (!j["audits"].is_array()) throw ConfigError("audits must be an array of names");
        for (const auto& a : j["audits"]) c.audits.push_back(a.get<std::string>());
    }
    if (j.contains("sweep")) c.sweep = parse_sweep(j["sweep"]);
    return c;
}

json to_json(const ExperimentConfig& c) {
    json j;
    j["problem"] = problem_to_json(c.problem);
    j["anderson"] = anderson_to_json(c.anderson);
    j["x0"] = x0_to_json(c.x0);
    if (c.output) j["output"] = json{{"trace_path", c.output->trace_path},
                                     {"format", c.output->format == OutputSpec::Format::Csv ? "csv" : "json"}};
    if (!c.audits.empty()) j["audits"] = c.audits;
    if (c.sweep) j["sweep"] = sweep_to_json(*c.sweep);
    return j;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

aa::Vector resolve_x0(const ExperimentConfig& c, int dimension) {
    switch (c.x0.kind) {
        case X0Spec::Kind::Values:
            if (static_cast<int>(c.x0.values.size()) != dimension) {
                throw ConfigError("x0 has " + std::to_string(c.x0.values.size()) +
                                  " entries but the problem dimension is " + std::to_string(dimension));
            }
            return c.x0.values;
        case X0Spec::Kind::Zero:
            return aa::Vector(static_cast<std::size_t>(dimension), 0.0);
        case X0Spec::Kind::Default:
            if (c.problem.kind == ProblemSelector::Kind::Scalar) {
                return {aa::problems::scalar_default_x0(c.problem.scalar_kind)};
            }
            return aa::Vector(static_cast<std::size_t>(dimension), 0.0);
    }
    throw ConfigError("unreachable x0 kind");
}

} // namespace aacli
