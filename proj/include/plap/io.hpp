#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "plap/core.hpp"
#include "plap/fields.hpp"
#include "plap/mesh.hpp"
#include "plap/radial.hpp"
#include "plap/solver.hpp"
#include "plap/sweep.hpp"
#include "plap/threshold.hpp"

namespace plap {

inline constexpr int kSchemaVersion = 1;

/// Invalid or inconsistent configuration input; maps to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    enum class Domain { Radial, Disk };
    Domain domain{Domain::Radial};
    // radial domain
    int N{2};
    double R{1.0};
    int cells{200};
    double grading{1.0};
    // disk domain
    double disk_R{1.0};
    int refinement{4};

    ProblemData data;

    double p{2.0};
    SolveParams solver;
    SweepParams sweep;
    ThresholdOptions threshold;

    std::string output_dir{"."};
};

namespace io_detail {

inline double require_number(const nlohmann::json& j, const char* key, double fallback,
                             bool required = false) {
    if (!j.contains(key)) {
        if (required) throw ConfigError(std::string("missing config key: ") + key);
        return fallback;
    }
    if (!j.at(key).is_number())
        throw ConfigError(std::string("config key must be a number: ") + key);
    return j.at(key).get<double>();
}

inline SourceSpec parse_source(const nlohmann::json& j) {
    const std::string kind = j.value("kind", "constant");
    if (kind == "constant") return SourceSpec::constant(require_number(j, "value", 0.0));
    if (kind == "radial_singular")
        return SourceSpec::radial_singular(require_number(j, "A", 0.0, true));
    if (kind == "tabulated") {
        if (!j.contains("table") || !j.at("table").is_array())
            throw ConfigError("tabulated source needs a 'table' array");
        return SourceSpec::tabulated(j.at("table").get<std::vector<double>>());
    }
    throw ConfigError("unknown source kind: " + kind);
}

inline BoundarySpec parse_boundary(const nlohmann::json& j) {
    const std::string kind = j.value("kind", "constant");
    if (kind == "constant") return BoundarySpec::constant(require_number(j, "value", 0.0));
    if (kind == "tabulated") {
        if (!j.contains("table") || !j.at("table").is_array())
            throw ConfigError("tabulated boundary spec needs a 'table' array");
        return BoundarySpec::tabulated(j.at("table").get<std::vector<double>>());
    }
    throw ConfigError("unknown boundary spec kind: " + kind);
}

inline nlohmann::json parse_set_value(const std::string& text) {
    const auto parsed = nlohmann::json::parse(text, nullptr, false);
    if (!parsed.is_discarded()) return parsed;
    return nlohmann::json(text);  // bare string
}

}  // namespace io_detail

/// Applies one `--set path=value` override; path components are dot-separated.
inline void apply_override(nlohmann::json& config, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("--set expects path=value, got: " + spec);
    std::string pointer = "/";
    for (char c : spec.substr(0, eq)) pointer += (c == '.') ? '/' : c;
    try {
        config[nlohmann::json::json_pointer(pointer)] =
            io_detail::parse_set_value(spec.substr(eq + 1));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad --set path: ") + e.what());
    }
}

inline ExperimentConfig parse_config(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    const int sv = j.value("schema_version", kSchemaVersion);
    if (sv != kSchemaVersion)
        throw ConfigError("unsupported config schema_version " + std::to_string(sv));

    ExperimentConfig cfg;
    if (!j.contains("domain") || !j.at("domain").is_object())
        throw ConfigError("config needs a 'domain' object");
    const auto& dom = j.at("domain");
    const bool has_radial = dom.contains("radial");
    const bool has_disk = dom.contains("disk");
    if (has_radial == has_disk)
        throw ConfigError("domain must contain exactly one of 'radial' or 'disk'");
    using io_detail::require_number;
    if (has_radial) {
        cfg.domain = ExperimentConfig::Domain::Radial;
        const auto& r = dom.at("radial");
        cfg.N = static_cast<int>(require_number(r, "N", 2));
        cfg.R = require_number(r, "R", 1.0);
        cfg.cells = static_cast<int>(require_number(r, "cells", 200));
        cfg.grading = require_number(r, "grading", 1.0);
    } else {
        cfg.domain = ExperimentConfig::Domain::Disk;
        const auto& dsk = dom.at("disk");
        cfg.disk_R = require_number(dsk, "R", 1.0);
        cfg.refinement = static_cast<int>(require_number(dsk, "refinement", 4));
    }

    if (j.contains("data")) {
        const auto& d = j.at("data");
        if (d.contains("f")) cfg.data.f = io_detail::parse_source(d.at("f"));
        if (d.contains("g")) cfg.data.g = io_detail::parse_boundary(d.at("g"));
        if (d.contains("lambda")) cfg.data.lambda = io_detail::parse_boundary(d.at("lambda"));
        cfg.data.lambda_integrable_only = d.value("lambda_integrable_only", false);
    }

    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        cfg.p = require_number(s, "p", cfg.p);
        cfg.solver.epsilon = require_number(s, "epsilon", cfg.solver.epsilon);
        cfg.solver.newton_tol = require_number(s, "newton_tol", cfg.solver.newton_tol);
        cfg.solver.max_iters =
            static_cast<int>(require_number(s, "max_iters", cfg.solver.max_iters));
        cfg.solver.cg_tol = require_number(s, "cg_tol", cfg.solver.cg_tol);
    }

    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        if (s.contains("schedule")) {
            if (!s.at("schedule").is_array())
                throw ConfigError("sweep.schedule must be an array of p values");
            cfg.sweep.p_schedule = s.at("schedule").get<std::vector<double>>();
        } else if (s.contains("levels")) {
            cfg.sweep.p_schedule =
                default_p_schedule(static_cast<int>(require_number(s, "levels", 7)));
        }
        cfg.sweep.overflow_guard =
            require_number(s, "overflow_guard", cfg.sweep.overflow_guard);
        cfg.sweep.epsilon_scale =
            require_number(s, "epsilon_scale", cfg.sweep.epsilon_scale);
        cfg.sweep.truncation_level =
            require_number(s, "truncation_level", cfg.sweep.truncation_level);
    }
    cfg.sweep.base = cfg.solver;

    if (j.contains("threshold")) {
        const auto& t = j.at("threshold");
        cfg.threshold.inner_iters =
            static_cast<int>(require_number(t, "inner_iters", cfg.threshold.inner_iters));
        cfg.threshold.outer_iters =
            static_cast<int>(require_number(t, "outer_iters", cfg.threshold.outer_iters));
        cfg.threshold.polish_sweeps =
            static_cast<int>(require_number(t, "polish_sweeps", cfg.threshold.polish_sweeps));
        cfg.threshold.tol = require_number(t, "tol", cfg.threshold.tol);
        cfg.threshold.seed =
            static_cast<unsigned>(require_number(t, "seed", cfg.threshold.seed));
    }

    if (j.contains("output")) cfg.output_dir = j.at("output").value("directory", cfg.output_dir);
    return cfg;
}

inline Mesh build_mesh(const ExperimentConfig& cfg) {
    try {
        if (cfg.domain == ExperimentConfig::Domain::Radial)
            return build_radial(cfg.N, cfg.R, cfg.cells, cfg.grading);
        return build_disk(cfg.disk_R, cfg.refinement);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

// ---------------------------------------------------------------------------
// emitters

namespace io_detail {

inline std::string csv_num(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace io_detail

inline nlohmann::json energy_to_json(const EnergyBreakdown& e) {
    return {{"grad_term", e.grad_term},
            {"boundary_term", e.boundary_term},
            {"source_term", e.source_term},
            {"boundary_source_term", e.boundary_source_term},
            {"total", e.total()}};
}

inline nlohmann::json solve_result_to_json(const SolveResult& r) {
    return {{"p", r.p},
            {"epsilon", r.epsilon},
            {"iterations", r.iterations},
            {"final_residual", r.final_residual},
            {"converged", r.converged},
            {"sup_norm", r.u.sup_norm()},
            {"energy", energy_to_json(r.energy)}};
}

inline nlohmann::json limit_checks_to_json(const LimitCheckReport& rep) {
    nlohmann::json trunc = nlohmann::json::object();
    for (const auto& [k, v] : rep.truncated_flux_sup)
        trunc[io_detail::csv_num(k)] = v;
    return {{"sup_norm_z", rep.sup_norm_z},
            {"sup_norm_beta_on_lambda_pos", rep.sup_norm_beta_on_lambda_pos},
            {"div_residual", rep.div_residual},
            {"boundary_residual", rep.boundary_residual},
            {"pairing_gap", rep.pairing_gap},
            {"complementarity_residual", rep.complementarity_residual},
            {"truncated_flux_sup", trunc}};
}

inline nlohmann::json sweep_report_to_json(const SweepReport& rep) {
    nlohmann::json recs = nlohmann::json::array();
    for (const auto& r : rep.records)
        recs.push_back({{"p", r.p},
                        {"epsilon", r.epsilon},
                        {"norm_lambda", r.norm_lambda},
                        {"sup_norm", r.sup_norm},
                        {"grad_term", r.grad_term},
                        {"boundary_term", r.boundary_term},
                        {"flux_sup", r.flux_sup},
                        {"truncated_flux_sup", r.truncated_flux_sup},
                        {"iterations", r.iterations},
                        {"converged", r.converged},
                        {"overflow", r.overflow}});
    return {{"schema_version", kSchemaVersion},
            {"records", recs},
            {"fit",
             {{"M_estimate", rep.fit.M_estimate},
              {"r_squared", rep.fit.r_squared},
              {"points", rep.fit.points},
              {"degenerate_fit", rep.fit.degenerate_fit},
              {"valid", rep.fit.valid}}},
            {"overflowed", rep.overflowed},
            {"verdict", verdict_name(rep.verdict)}};
}

inline std::string sweep_report_to_csv(const SweepReport& rep) {
    std::ostringstream os;
    os << "# schema_version=" << kSchemaVersion << "\n";
    os << "p,norm_lambda,sup_norm,grad_term,boundary_term,flux_sup\n";
    for (const auto& r : rep.records)
        os << io_detail::csv_num(r.p) << ',' << io_detail::csv_num(r.norm_lambda) << ','
           << io_detail::csv_num(r.sup_norm) << ',' << io_detail::csv_num(r.grad_term) << ','
           << io_detail::csv_num(r.boundary_term) << ',' << io_detail::csv_num(r.flux_sup)
           << "\n";
    return os.str();
}

inline nlohmann::json threshold_report_to_json(const ThresholdReport& rep,
                                               bool include_certificate = true) {
    const char* method = rep.method == ThresholdReport::Method::Dinkelbach
                             ? "dinkelbach"
                             : (rep.method == ThresholdReport::Method::RadialClosedForm
                                    ? "radial_closed_form"
                                    : "slope_regression");
    nlohmann::json j = {{"schema_version", kSchemaVersion},
                        {"M_lower", rep.M_lower},
                        {"method", method},
                        {"iterations", rep.iterations},
                        {"converged", rep.converged},
                        {"zero_functional", rep.zero_functional}};
    if (include_certificate) j["certificate"] = rep.certificate.values;
    return j;
}

/// solution.csv: node_id, coordinates, nodal value.
inline std::string solution_to_csv(const Mesh& m, const Field& u) {
    bind_check(m, u);
    std::ostringstream os;
    os << "# schema_version=" << kSchemaVersion << "\n";
    os << (m.kind == Mesh::Kind::Radial1D ? "node_id,r,u" : "node_id,x,y,u") << "\n";
    for (int j = 0; j < m.node_count(); ++j) {
        os << j << ',' << io_detail::csv_num(m.nodes[j][0]);
        if (m.kind != Mesh::Kind::Radial1D) os << ',' << io_detail::csv_num(m.nodes[j][1]);
        os << ',' << io_detail::csv_num(u.values[j]) << "\n";
    }
    return os.str();
}

/// Long-format (p, r, u_p(r)) table from the closed-form radial solution.
inline std::string radial_grid_to_csv(const RadialCase& c, const std::vector<double>& ps,
                                      int r_samples) {
    if (r_samples < 2) throw std::invalid_argument("radial_grid_to_csv: need >= 2 samples");
    std::ostringstream os;
    os << "# schema_version=" << kSchemaVersion << "\n";
    os << "p,r,u\n";
    for (double p : ps)
        for (int i = 0; i < r_samples; ++i) {
            const double r = c.R * i / (r_samples - 1);
            os << io_detail::csv_num(p) << ',' << io_detail::csv_num(r) << ','
               << io_detail::csv_num(radial_solution(c, p, r)) << "\n";
        }
    return os.str();
}

/// Per-facet boundary residual table.
inline std::string boundary_table_to_csv(const Mesh& m, const ProblemData& d,
                                         const FluxField& flux) {
    const auto lam = lambda_values(m, d);
    const auto g = g_values(m, d);
    std::ostringstream os;
    os << "# schema_version=" << kSchemaVersion << "\n";
    os << "facet,z_dot_nu,lambda,beta,g,residual\n";
    for (int f = 0; f < m.facet_count(); ++f) {
        const double zb = flux.facet_normal_trace[f];
        const double lb = detail::facet_mean(m, lam, f);
        const double bb = detail::facet_mean(m, flux.beta, f);
        const double gb = detail::facet_mean(m, g, f);
        os << f << ',' << io_detail::csv_num(zb) << ',' << io_detail::csv_num(lb) << ','
           << io_detail::csv_num(bb) << ',' << io_detail::csv_num(gb) << ','
           << io_detail::csv_num(zb + lb * bb - gb) << "\n";
    }
    return os.str();
}

/// Reads a solution.csv emitted by solution_to_csv; rejects other schema
/// versions.
inline Field solution_from_csv(const Mesh& m, std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("# schema_version=", 0) != 0)
        throw ConfigError("solution csv: missing schema_version header");
    if (line != "# schema_version=" + std::to_string(kSchemaVersion))
        throw ConfigError("solution csv: unsupported schema_version");
    if (!std::getline(in, line)) throw ConfigError("solution csv: missing column header");
    Field u(m);
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        std::vector<std::string> cols;
        while (std::getline(ls, tok, ',')) cols.push_back(tok);
        if (cols.size() < 3) throw ConfigError("solution csv: malformed row");
        const int id = std::stoi(cols.front());
        if (id < 0 || id >= m.node_count())
            throw ConfigError("solution csv: node id out of range");
        u.values[id] = std::stod(cols.back());
        ++rows;
    }
    if (rows != m.node_count()) throw ConfigError("solution csv: row count mismatch");
    return u;
}

inline void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << body;
}

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

}  // namespace plap
