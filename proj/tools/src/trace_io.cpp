#include "trace_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "aa/errors.hpp"
#include "experiment_config.hpp"

namespace aacli {

using nlohmann::json;

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot open for writing: " + tmp);
        out << content;
        if (!out) throw ConfigError("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

namespace {

std::string classification_str(const aa::SolveReport& report) {
    if (!report.rate) return "none";
    return std::string(aa::to_string(report.rate->classification));
}

std::optional<aa::SolveStatus> parse_status(const std::string& s) {
    for (auto v : {aa::SolveStatus::Converged, aa::SolveStatus::Diverged, aa::SolveStatus::MaxIters,
                   aa::SolveStatus::NonFinite}) {
        if (s == aa::to_string(v)) return v;
    }
    return std::nullopt;
}

std::optional<aa::RateClassification> parse_classification(const std::string& s) {
    for (auto v : {aa::RateClassification::Linear, aa::RateClassification::Superlinear,
                   aa::RateClassification::Quadratic, aa::RateClassification::Stagnant,
                   aa::RateClassification::Divergent}) {
        if (s == aa::to_string(v)) return v;
    }
    return std::nullopt;
}

json rate_to_json(const aa::RateEstimate& r) {
    json j;
    j["fitted_rate"] = r.fitted_rate;
    j["window"] = {r.window.first, r.window.second};
    j["r_squared"] = r.r_squared;
    j["classification"] = std::string(aa::to_string(r.classification));
    return j;
}

aa::RateEstimate rate_from_json(const json& j) {
    aa::RateEstimate r;
    r.fitted_rate = j.at("fitted_rate").get<double>();
    r.window = {j.at("window")[0].get<int>(), j.at("window")[1].get<int>()};
    r.r_squared = j.at("r_squared").get<double>();
    if (auto c = parse_classification(j.at("classification").get<std::string>())) {
        r.classification = *c;
    }
    return r;
}

} // namespace

void write_trace_csv(const std::string& path, const aa::SolveReport& report) {
    std::ostringstream out;
    out << "# aa-trace v1\n";
    const int alpha_cols = report.config.depth_m + 1;
    out << "k,residual_norm,theta,beta";
    for (int i = 0; i < alpha_cols; ++i) out << ",alpha_" << i;
    out << "\n";
    for (const auto& s : report.steps) {
        out << s.k << ',' << format_g17(s.residual_norm) << ',' << format_g17(s.theta) << ','
            << format_g17(s.beta);
        for (int i = 0; i < alpha_cols; ++i) {
            out << ',';
            if (i < static_cast<int>(s.alpha.size())) out << format_g17(s.alpha[static_cast<std::size_t>(i)]);
        }
        out << "\n";
    }
    out << "# status: " << aa::to_string(report.status) << "\n";
    out << "# classification: " << classification_str(report) << "\n";
    out << "# iterations: " << report.iterations() << "\n";
    out << "# final_residual: " << format_g17(report.final_residual_norm()) << "\n";
    write_file_atomic(path, out.str());
}

void write_trace_json(const std::string& path, const aa::SolveReport& report,
                      const json& experiment_echo) {
    json j;
    j["format"] = "aa-trace";
    j["version"] = 1;
    j["problem"] = {{"name", report.problem_name}, {"dimension", report.dimension}};
    j["experiment"] = experiment_echo;
    j["x0"] = report.x0;
    j["status"] = std::string(aa::to_string(report.status));
    j["classification"] = report.rate ? json(classification_str(report)) : json(nullptr);
    j["rate"] = report.rate ? rate_to_json(*report.rate) : json(nullptr);
    j["clamp_warnings"] = report.clamp_warnings;

    json steps = json::array();
    for (const auto& s : report.steps) {
        json js;
        js["k"] = s.k;
        js["residual_norm"] = s.residual_norm;
        js["theta"] = s.theta;
        js["theta_raw"] = s.theta_raw;
        js["beta"] = s.beta;
        js["alpha"] = s.alpha;
        js["gamma"] = s.gamma;
        js["depth_used"] = s.depth_used;
        js["mixed_residual_norm"] = s.mixed_residual_norm;
        js["x"] = s.accepted;
        js["w"] = s.residual;
        steps.push_back(std::move(js));
    }
    j["steps"] = std::move(steps);
    write_file_atomic(path, j.dump(1, '\t') + "\n");
}

namespace {

LoadedTrace load_trace_json_value(const json& j) {
    LoadedTrace out;
    aa::SolveReport& r = out.report;
    r.problem_name = j.at("problem").at("name").get<std::string>();
    r.dimension = j.at("problem").at("dimension").get<int>();
    if (j.contains("experiment") && !j["experiment"].is_null()) {
        out.experiment = j["experiment"];
        const auto cfg = parse_config(*out.experiment);
        r.config = cfg.anderson;
    }
    r.x0 = j.at("x0").get<aa::Vector>();
    if (auto s = parse_status(j.at("status").get<std::string>())) r.status = *s;
    if (j.contains("rate") && !j["rate"].is_null()) r.rate = rate_from_json(j["rate"]);
    r.clamp_warnings = j.value("clamp_warnings", 0);
    for (const auto& js : j.at("steps")) {
        aa::StepReport s;
        s.k = js.at("k").get<int>();
        s.residual_norm = js.at("residual_norm").get<double>();
        s.theta = js.at("theta").get<double>();
        s.theta_raw = js.value("theta_raw", s.theta);
        s.beta = js.at("beta").get<double>();
        s.alpha = js.at("alpha").get<std::vector<double>>();
        s.gamma = js.at("gamma").get<std::vector<double>>();
        s.depth_used = js.at("depth_used").get<int>();
        s.mixed_residual_norm = js.at("mixed_residual_norm").get<double>();
        s.accepted = js.at("x").get<aa::Vector>();
        s.residual = js.at("w").get<aa::Vector>();
        r.steps.push_back(std::move(s));
    }
    out.has_vectors = !r.steps.empty() && !r.steps.front().accepted.empty();
    return out;
}

LoadedTrace load_trace_csv_stream(std::istream& in) {
    LoadedTrace out;
    aa::SolveReport& r = out.report;
    std::string line;
    if (!std::getline(in, line) || line != "# aa-trace v1") {
        throw ConfigError("not an aa-trace CSV (missing '# aa-trace v1' header)");
    }
    if (!std::getline(in, line)) throw ConfigError("truncated trace: missing column header");
    int alpha_cols = 0;
    {
        std::stringstream ss(line);
        std::string col;
        while (std::getline(ss, col, ',')) {
            if (col.rfind("alpha_", 0) == 0) ++alpha_cols;
        }
    }
    r.config.depth_m = alpha_cols > 0 ? alpha_cols - 1 : 0;
    r.config.residual_tol = 1e-300; // unknown from CSV; keep validation happy

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto colon = line.find(':');
            if (colon == std::string::npos) continue;
            const std::string key = line.substr(2, colon - 2);
            std::string value = line.substr(colon + 1);
            if (!value.empty() && value[0] == ' ') value.erase(0, 1);
            if (key == "status") {
                if (auto s = parse_status(value)) r.status = *s;
            } else if (key == "classification" && value != "none") {
                if (auto c = parse_classification(value)) {
                    aa::RateEstimate est;
                    est.classification = *c;
                    r.rate = est;
                }
            }
            continue;
        }
        std::stringstream ss(line);
        std::string field;
        aa::StepReport s;
        std::getline(ss, field, ',');
        s.k = std::stoi(field);
        std::getline(ss, field, ',');
        s.residual_norm = std::stod(field);
        std::getline(ss, field, ',');
        s.theta = std::stod(field);
        s.theta_raw = s.theta;
        std::getline(ss, field, ',');
        s.beta = std::stod(field);
        while (std::getline(ss, field, ',')) {
            if (!field.empty()) s.alpha.push_back(std::stod(field));
        }
        s.depth_used = s.alpha.empty() ? 0 : static_cast<int>(s.alpha.size()) - 1;
        s.mixed_residual_norm = s.theta * s.residual_norm; // definition of the gain
        r.steps.push_back(std::move(s));
    }
    out.has_vectors = false;
    return out;
}

} // namespace

LoadedTrace load_trace(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open trace file: " + path);
    const char first = static_cast<char>(in.peek());
    if (first == '{') {
        json j;
        try {
            in >> j;
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("trace is not valid JSON: ") + e.what());
        }
        if (j.value("format", "") != "aa-trace") {
            throw ConfigError("JSON file is not an aa-trace (missing format marker)");
        }
        return load_trace_json_value(j);
    }
    return load_trace_csv_stream(in);
}

} // namespace aacli
