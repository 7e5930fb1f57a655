// Command-line driver: solve / sweep / threshold / radial / verify / check-ineq.
#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "plap/inequalities.hpp"
#include "plap/io.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void emit_error(const std::string& kind, const std::string& message) {
    std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << "\n";
}

nlohmann::json load_config_json(const std::string& path,
                                const std::vector<std::string>& overrides) {
    nlohmann::json j;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw plap::ConfigError("cannot read config file: " + path);
        j = nlohmann::json::parse(in, nullptr, false);
        if (j.is_discarded()) throw plap::ConfigError("config file is not valid JSON");
    } else {
        j = nlohmann::json::object();
    }
    for (const auto& s : overrides) plap::apply_override(j, s);
    return j;
}

std::string out_path(const plap::ExperimentConfig& cfg, const std::string& name) {
    if (cfg.output_dir.empty() || cfg.output_dir == ".") return name;
    return cfg.output_dir + "/" + name;
}

int cmd_solve(const plap::ExperimentConfig& cfg) {
    const plap::Mesh mesh = plap::build_mesh(cfg);
    plap::SolveParams sp = cfg.solver;
    sp.p = cfg.p;
    const plap::SolveResult res = plap::solve_p(mesh, cfg.data, sp);
    if (!res.converged) {
        emit_error("numerical", "solver did not converge");
        return kExitNumeric;
    }
    const plap::LimitCheckReport checks = plap::run_limit_checks(mesh, cfg.data, res);
    plap::write_text_file(out_path(cfg, "solution.csv"),
                          plap::solution_to_csv(mesh, res.u));
    nlohmann::json rep = {{"schema_version", plap::kSchemaVersion},
                          {"timestamp", timestamp_utc()},
                          {"solve", plap::solve_result_to_json(res)},
                          {"limit_checks", plap::limit_checks_to_json(checks)}};
    plap::write_json_file(out_path(cfg, "report.json"), rep);
    std::cout << "converged p=" << res.p << " iterations=" << res.iterations
              << " sup_norm=" << res.u.sup_norm() << "\n";
    return 0;
}

int cmd_sweep(const plap::ExperimentConfig& cfg) {
    const plap::Mesh mesh = plap::build_mesh(cfg);
    const plap::SweepReport rep = plap::run_sweep(mesh, cfg.data, cfg.sweep);
    nlohmann::json j = plap::sweep_report_to_json(rep);
    j["timestamp"] = timestamp_utc();
    plap::write_json_file(out_path(cfg, "sweep.json"), j);
    plap::write_text_file(out_path(cfg, "sweep.csv"), plap::sweep_report_to_csv(rep));
    std::cout << "VERDICT=" << plap::verdict_name(rep.verdict)
              << " M_SLOPE=" << rep.fit.M_estimate << "\n";
    return 0;
}

int cmd_threshold(const plap::ExperimentConfig& cfg) {
    const plap::Mesh mesh = plap::build_mesh(cfg);
    const plap::ThresholdReport rep = plap::estimate_M(mesh, cfg.data, cfg.threshold);
    nlohmann::json j = plap::threshold_report_to_json(rep);
    j["timestamp"] = timestamp_utc();

    if (cfg.domain == plap::ExperimentConfig::Domain::Radial &&
        cfg.data.f.kind == plap::SourceSpec::Kind::RadialSingular &&
        cfg.data.g.kind == plap::BoundarySpec::Kind::Constant &&
        cfg.data.lambda.kind == plap::BoundarySpec::Kind::Constant &&
        cfg.data.lambda.value > 0.0) {
        j["radial_M"] = plap::radial_M(cfg.N, cfg.R, cfg.data.f.value, cfg.data.g.value,
                                       cfg.data.lambda.value);
    }
    const bool unit_source = cfg.data.f.kind == plap::SourceSpec::Kind::Constant &&
                             cfg.data.f.value == 1.0;
    const bool zero_g = cfg.data.g.kind == plap::BoundarySpec::Kind::Constant &&
                        cfg.data.g.value == 0.0;
    const bool const_lambda = cfg.data.lambda.kind == plap::BoundarySpec::Kind::Constant;
    if (unit_source && zero_g && const_lambda)
        j["eigen_lower_bound"] = plap::eigen_lower_bound(mesh, cfg.data.lambda.value);

    plap::write_json_file(out_path(cfg, "threshold.json"), j);
    std::cout << "M_ESTIMATE=" << rep.M_lower << "\n";
    return 0;
}

int cmd_radial(const plap::ExperimentConfig& cfg, const std::vector<double>& ps,
               int samples) {
    if (cfg.data.f.kind != plap::SourceSpec::Kind::RadialSingular ||
        cfg.data.g.kind != plap::BoundarySpec::Kind::Constant ||
        cfg.data.lambda.kind != plap::BoundarySpec::Kind::Constant)
        throw plap::ConfigError(
            "radial command needs f of kind radial_singular and constant g, lambda");
    plap::RadialCase c{cfg.N, cfg.R, cfg.data.f.value, cfg.data.g.value,
                       cfg.data.lambda.value};
    std::vector<double> grid = ps.empty() ? plap::default_p_schedule() : ps;
    plap::write_text_file(out_path(cfg, "radial.csv"),
                          plap::radial_grid_to_csv(c, grid, samples));
    const plap::RadialLimit lim = plap::radial_limit(c);
    std::cout << "branch=" << lim.branch
              << " M=" << plap::radial_M(c.N, c.R, c.A, c.gamma, c.lambda) << "\n";
    return 0;
}

int cmd_verify(const plap::ExperimentConfig& cfg, const std::string& solution_path) {
    const plap::Mesh mesh = plap::build_mesh(cfg);
    std::ifstream in(solution_path);
    if (!in) throw plap::ConfigError("cannot read solution file: " + solution_path);
    const plap::Field u = plap::solution_from_csv(mesh, in);

    plap::SolveResult res;
    res.u = u;
    res.p = cfg.p;
    res.epsilon = cfg.solver.epsilon;
    res.converged = true;
    res.status = plap::SolveStatus::Converged;
    const plap::LimitCheckReport checks = plap::run_limit_checks(mesh, cfg.data, res);
    const plap::FluxField flux = plap::extract_flux(mesh, cfg.data, res);
    plap::write_text_file(out_path(cfg, "boundary.csv"),
                          plap::boundary_table_to_csv(mesh, cfg.data, flux));
    nlohmann::json j = {{"schema_version", plap::kSchemaVersion},
                        {"timestamp", timestamp_utc()},
                        {"limit_checks", plap::limit_checks_to_json(checks)}};
    plap::write_json_file(out_path(cfg, "verify.json"), j);
    std::cout << "div_residual=" << checks.div_residual
              << " boundary_residual=" << checks.boundary_residual << "\n";
    return 0;
}

int cmd_check_ineq(unsigned seed, int trials) {
    // randomized mixed-Hoelder battery on a small disk mesh
    const plap::Mesh mesh = plap::build_disk(1.0, 2);
    plap::ProblemData d;
    d.lambda = plap::BoundarySpec::constant(1.0);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> val(-2.0, 2.0);
    std::uniform_real_distribution<double> pexp(1.1, 4.0);

    int violations = 0;
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        auto rand_vec = [&](int n) {
            std::vector<double> v(n);
            for (double& x : v) x = val(rng);
            return v;
        };
        plap::MixedFunctionPair a(mesh, d, rand_vec(mesh.element_count()),
                                  rand_vec(mesh.boundary_node_count()));
        plap::MixedFunctionPair b(mesh, d, rand_vec(mesh.element_count()),
                                  rand_vec(mesh.boundary_node_count()));
        const double p = pexp(rng);
        const auto sides = plap::mixed_holder_check(a, b, p);
        const double rel = (sides.lhs - sides.rhs) / (sides.rhs + 1e-300);
        worst = std::max(worst, rel);
        if (rel > 1e-12) ++violations;
    }
    std::cout << "trials=" << trials << " violations=" << violations
              << " worst_relative_excess=" << worst << "\n";
    return violations == 0 ? 0 : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robin p-Laplacian laboratory"};
    app.require_subcommand(1);
    app.fallthrough();  // allow -c/--set after the subcommand name

    std::string config_path;
    std::vector<std::string> overrides;
    app.add_option("-c,--config", config_path, "JSON config file");
    app.add_option("--set", overrides, "override config keys, path=value");

    auto* solve = app.add_subcommand("solve", "solve the regularized problem at fixed p");
    double p_flag = 0.0;
    solve->add_option("-p", p_flag, "exponent p in (1, 2]");

    auto* sweep = app.add_subcommand("sweep", "run the p -> 1 continuation and classify");
    auto* threshold = app.add_subcommand("threshold", "estimate the threshold M directly");

    auto* radial = app.add_subcommand("radial", "dump closed-form radial solutions");
    std::vector<double> radial_ps;
    int radial_samples = 101;
    radial->add_option("--p-values", radial_ps, "p grid (default: sweep schedule)");
    radial->add_option("--samples", radial_samples, "radial sample count");

    auto* verify = app.add_subcommand("verify", "run limit-identity checks on a saved solution");
    std::string solution_path = "solution.csv";
    verify->add_option("--solution", solution_path, "solution csv to verify");

    auto* check = app.add_subcommand("check-ineq", "randomized inequality battery");
    unsigned ineq_seed = 1;
    int ineq_trials = 1000;
    check->add_option("--seed", ineq_seed, "random seed");
    check->add_option("--trials", ineq_trials, "number of random trials");

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) return cmd_check_ineq(ineq_seed, ineq_trials);

        const nlohmann::json raw = load_config_json(config_path, overrides);
        const plap::ExperimentConfig cfg = plap::parse_config(raw);

        if (solve->parsed()) {
            plap::ExperimentConfig c = cfg;
            if (p_flag > 0.0) c.p = p_flag;
            return cmd_solve(c);
        }
        if (sweep->parsed()) return cmd_sweep(cfg);
        if (threshold->parsed()) return cmd_threshold(cfg);
        if (radial->parsed()) return cmd_radial(cfg, radial_ps, radial_samples);
        if (verify->parsed()) return cmd_verify(cfg, solution_path);
    } catch (const plap::ConfigError& e) {
        emit_error("config", e.what());
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        emit_error("config", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        emit_error("numerical", e.what());
        return kExitNumeric;
    }
    return 0;
}
