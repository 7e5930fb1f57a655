// Acceptance gate: one printed PASS/FAIL line per criterion; exit code is
// the number of failing criteria.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "plap/fields.hpp"
#include "plap/inequalities.hpp"
#include "plap/io.hpp"
#include "plap/radial.hpp"
#include "plap/solver.hpp"
#include "plap/sweep.hpp"
#include "plap/threshold.hpp"

using namespace plap;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("CRITERION %d: %s  (%s)\n", criterion, pass ? "PASS" : "FAIL",
                detail.c_str());
    if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ProblemData radial_data(double A, double gamma, double lambda) {
    ProblemData d;
    d.f = SourceSpec::radial_singular(A);
    d.g = BoundarySpec::constant(gamma);
    d.lambda = BoundarySpec::constant(lambda);
    return d;
}

Field closed_form_field(const Mesh& m, const RadialCase& c, double p) {
    Field u(m);
    for (int j = 0; j < m.node_count(); ++j)
        u.values[j] = radial_solution(c, p, m.nodes[j][0]);
    return u;
}

// --- 1: radial closed-form reproduction --------------------------------
void criterion1() {
    const RadialCase c{2, 1.0, 1.0, 0.5, 2.0};
    const Mesh m = build_radial(2, 1.0, 200, 1.0);
    const ProblemData d = radial_data(1.0, 0.5, 2.0);
    double worst = 0.0, slowest = 0.0;
    bool ok = true;
    for (double p : {2.0, 1.5, 1.25, 1.1}) {
        SolveParams sp;
        sp.p = p;
        sp.epsilon = 1e-9;
        const auto t0 = std::chrono::steady_clock::now();
        const SolveResult res = solve_p(m, d, sp);
        slowest = std::max(slowest, seconds_since(t0));
        if (!res.converged) {
            ok = false;
            continue;
        }
        for (int j = 0; j < m.node_count(); ++j) {
            const double exact = radial_solution(c, p, m.nodes[j][0]);
            worst = std::max(worst, std::abs(res.u.values[j] - exact) /
                                        std::max(1.0, std::abs(exact)));
        }
    }
    ok = ok && worst <= 1e-3 && slowest <= 5.0;
    report(1, ok,
           "closed-form match, max rel err " + std::to_string(worst) +
               ", slowest solve " + std::to_string(slowest) + " s");
}

// --- 2: taxonomy reproduction ------------------------------------------
void criterion2() {
    struct Case {
        double A, gamma, lambda;
        Verdict expected;
    };
    const Case cases[] = {
        {2.0, 0.0, 1.0, Verdict::BlowUp},       // branch 1: a = 2
        {1.0, 0.5, 1.0, Verdict::BlowUp},       // 2a: a = 1, lambda < 1+gamma
        {1.0, 0.5, 1.5, Verdict::Finite},       // 2b
        {1.0, 0.5, 2.0, Verdict::Finite},       // 2c
        {0.5, 0.25, 0.5, Verdict::BlowUp},      // 3a: b = 1.5
        {0.5, 0.5, 1.0, Verdict::Finite},       // 3b: b = 1
        {0.5, 0.0, 2.0, Verdict::Degenerate},   // 3c: b = 0.25
        {3.0, 1.0, 2.0, Verdict::BlowUp},       // branch 1 again, a = 3
        {0.25, 0.25, 1.0, Verdict::Degenerate}, // 3c again, b = 0.5
    };
    const Mesh m = build_radial(2, 1.0, 100, 1.0);
    const auto t0 = std::chrono::steady_clock::now();
    int correct = 0;
    for (const auto& k : cases) {
        const SweepReport rep = run_sweep(m, radial_data(k.A, k.gamma, k.lambda));
        if (rep.verdict == k.expected) ++correct;
    }
    const double elapsed = seconds_since(t0);
    report(2, correct == 9 && elapsed <= 120.0,
           std::to_string(correct) + "/9 verdicts correct in " +
               std::to_string(elapsed) + " s");
}

// --- 3: threshold agreement --------------------------------------------
void criterion3() {
    struct Case {
        double A, gamma, lambda, M;
    };
    const Case cases[] = {
        {0.25, 0.0, 1.0, 0.25}, {0.5, 0.0, 1.0, 0.5}, {1.0, 0.5, 1.5, 1.0},
        {1.0, 0.5, 1.0, 1.5},   {2.0, 0.0, 1.0, 2.0}, {3.0, 0.0, 1.0, 3.0},
    };
    const Mesh m_est = build_radial(2, 1.0, 400, 1.0);
    const Mesh m_sweep = build_radial(2, 1.0, 150, 1.0);
    double worst_est = 0.0, worst_slope = 0.0;
    for (const auto& k : cases) {
        const ProblemData d = radial_data(k.A, k.gamma, k.lambda);
        const ThresholdReport th = estimate_M(m_est, d);
        worst_est = std::max(worst_est, std::abs(th.M_lower - k.M) / k.M);
        const SweepReport sw = run_sweep(m_sweep, d);
        if (sw.fit.valid)
            worst_slope = std::max(worst_slope, std::abs(sw.fit.M_estimate - k.M) / k.M);
        else
            worst_slope = 1.0;
    }
    report(3, worst_est <= 0.02 && worst_slope <= 0.05,
           "dual-norm rel err " + std::to_string(worst_est) + ", slope rel err " +
               std::to_string(worst_slope));
}

// --- 4: brute-force oracle equivalence ---------------------------------
void criterion4() {
    std::mt19937 rng(123);
    std::uniform_real_distribution<double> fval(-1.5, 1.5);
    std::uniform_real_distribution<double> lval(0.3, 2.0);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        const Mesh m = build_interval(0.0, 1.0, 5);
        ProblemData d;
        std::vector<double> table(m.node_count());
        for (double& v : table) v = fval(rng);
        d.f = SourceSpec::tabulated(table);
        std::vector<double> gtab(m.boundary_node_count());
        for (double& v : gtab) v = fval(rng);
        d.g = BoundarySpec::tabulated(gtab);
        std::vector<double> ltab(m.boundary_node_count());
        for (double& v : ltab) v = lval(rng);
        d.lambda = BoundarySpec::tabulated(ltab);

        const double lp = oracle::lp_vertex_max(oracle::chain_lp_from(m, d));
        const ThresholdReport rep = estimate_M(m, d);
        worst = std::max(worst, std::abs(rep.M_lower - lp) / std::max(1.0, lp));
    }
    report(4, worst <= 1e-6,
           "max |dual-norm - LP oracle| rel = " + std::to_string(worst));
}

// --- 5: limit identities at p = 1.0078 ---------------------------------
void criterion5() {
    const double p = 1.0 + 1.0 / 128.0;
    const RadialCase c{2, 1.0, 1.0, 0.5, 1.5};  // M = 1 case
    const Mesh m = build_radial(2, 1.0, 200, 1.0);
    const ProblemData d = radial_data(1.0, 0.5, 1.5);
    SolveParams sp;
    sp.p = p;
    sp.epsilon = 1e-8;
    const SolveResult res = solve_p(m, d, sp, closed_form_field(m, c, p));
    bool ok = res.converged;
    std::string detail = "solver converged=" + std::to_string(res.converged);
    if (ok) {
        const FluxField flux = extract_flux(m, d, res);
        const double div = check_divergence(m, d, flux);
        const double bdry = check_boundary_identity(m, d, flux);
        const double gap = check_pairing(m, d, res, flux).gap;
        const double comp =
            check_complementarity(m, d, res, flux, default_zero_band(res.u));
        const auto lam = lambda_values(m, d);
        double beta_sup = 0.0;
        for (int b = 0; b < m.boundary_node_count(); ++b)
            if (lam[b] > 0.0) beta_sup = std::max(beta_sup, std::abs(flux.beta[b]));
        const double mval = std::max(flux.sup_norm(), beta_sup);
        ok = div <= 1e-6 && bdry <= 1e-6 && gap <= 0.05 && comp <= 1e-3 &&
             mval >= 0.9 && mval <= 1.1;
        detail = "div " + std::to_string(div) + ", bdry " + std::to_string(bdry) +
                 ", pairing " + std::to_string(gap) + ", compl " + std::to_string(comp) +
                 ", max{|z|,|beta|} " + std::to_string(mval);
    }
    report(5, ok, detail);
}

// --- 6: truncated-flux bound on the blow-up case ------------------------
void criterion6() {
    const double p = 1.0 + 1.0 / 128.0;
    const RadialCase c{2, 1.0, 2.0, 0.0, 1.0};  // a = 2, M = 2
    const Mesh m = build_radial(2, 1.0, 200, 1.0);
    const ProblemData d = radial_data(2.0, 0.0, 1.0);
    SolveParams sp;
    sp.p = p;
    const Field guess = closed_form_field(m, c, p);
    sp.epsilon = 1e-8 * std::max(1.0, guess.sup_norm());
    const SolveResult res = solve_p(m, d, sp, guess);
    bool ok = res.converged;
    std::string detail = "solver converged=" + std::to_string(res.converged);
    if (ok) {
        const FluxField flux = extract_flux(m, d, res);
        const TruncatedFlux tf = truncated_flux(m, res, flux, 10.0);
        ok = tf.sup <= 1.05 && flux.sup_norm() >= 1.8;
        detail = "truncated sup " + std::to_string(tf.sup) + ", full sup " +
                 std::to_string(flux.sup_norm());
    }
    report(6, ok, detail);
}

// --- 7: appendix property battery --------------------------------------
void criterion7() {
    const Mesh mesh = build_disk(1.0, 2);
    ProblemData d;
    d.lambda = BoundarySpec::constant(1.3);
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> val(-2.0, 2.0);
    std::uniform_real_distribution<double> pexp(1.05, 5.0);
    auto random_pair = [&]() {
        std::vector<double> vol(mesh.element_count()), bnd(mesh.boundary_node_count());
        for (double& v : vol) v = val(rng);
        for (double& v : bnd) v = val(rng);
        return MixedFunctionPair(mesh, d, vol, bnd);
    };

    int violations = 0;
    bool monotone = true;
    double worst_limit = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const auto a = random_pair();
        const auto b = random_pair();
        const auto sides = mixed_holder_check(a, b, pexp(rng));
        if (sides.lhs > sides.rhs * (1.0 + 1e-12)) ++violations;
        // normalized monotonicity in s
        const double W = a.total_weight();
        double prev = 0.0;
        for (double e : {1.0, 2.0, 4.0, 8.0}) {
            const double v = mixed_norm(a, e) / std::pow(W, 1.0 / e);
            if (v < prev * (1.0 - 1e-12)) monotone = false;
            prev = v;
        }
        if (t < 50) {
            const double lim = mixed_norm_limit(a, {2.0, 8.0, 64.0, 1024.0});
            const double sup = weighted_sup(a);
            if (sup > 0.0)
                worst_limit = std::max(worst_limit, std::abs(lim - sup) / sup);
        }
    }
    report(7, violations == 0 && monotone && worst_limit <= 0.01,
           std::to_string(violations) + " Hoelder violations, limit rel err " +
               std::to_string(worst_limit) + ", monotone=" + std::to_string(monotone));
}

// --- 8: eigenvalue bound on the unit disk ------------------------------
void criterion8() {
    const Mesh disk = build_disk(1.0, 5);
    bool ok = true;
    std::string detail;
    for (double lambda : {0.5, 2.0}) {
        ProblemData d;
        d.f = SourceSpec::constant(1.0);
        d.lambda = BoundarySpec::constant(lambda);
        const double bound = eigen_lower_bound(disk, lambda);
        const ThresholdReport rep = estimate_M(disk, d);
        const double inv = 1.0 / rep.M_lower;
        const bool lower_ok = inv >= bound * 0.98;
        const bool near_eq = inv <= bound * 1.05;
        ok = ok && lower_ok && near_eq;
        detail += "lambda=" + std::to_string(lambda) + " 1/M=" + std::to_string(inv) +
                  " bound=" + std::to_string(bound) + "; ";
    }
    report(8, ok, detail);
}

// --- 9: property suites -------------------------------------------------
void criterion9() {
    const auto t0 = std::chrono::steady_clock::now();
    const Mesh m = build_radial(2, 1.0, 80, 1.0);
    bool ok = true;
    std::string detail;

    // gradient vs finite differences
    {
        const ProblemData d = radial_data(1.0, 0.5, 2.0);
        SolveParams sp;
        sp.p = 1.5;
        sp.epsilon = 1e-3;
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> val(-1.0, 1.0);
        Field u(m);
        for (double& v : u.values) v = val(rng);
        const Field g = energy_gradient(m, d, u, sp);
        double gscale = 0.0, worst = 0.0;
        for (double v : g.values) gscale = std::max(gscale, std::abs(v));
        for (int j = 0; j < m.node_count(); j += 3) {
            const double fd = oracle::central_diff(
                [&](double x) {
                    Field w = u;
                    w.values[j] = x;
                    return energy(m, d, w, sp).total();
                },
                u.values[j], 1e-6);
            worst = std::max(worst, std::abs(g.values[j] - fd) / (gscale + 1.0));
        }
        ok = ok && worst <= 1e-5;
        detail += "fd rel " + std::to_string(worst) + "; ";
    }

    // homogeneity under data scaling
    {
        const double p = 1.5;
        SolveParams sp;
        sp.p = p;
        sp.epsilon = 1e-10;
        const SolveResult base = solve_p(m, radial_data(1.0, 0.5, 2.0), sp);
        double worst = 0.0;
        for (double t : {0.5, 2.0}) {
            const SolveResult scaled = solve_p(m, radial_data(t, 0.5 * t, 2.0), sp);
            const double factor = std::pow(t, 1.0 / (p - 1.0));
            for (int j = 0; j < m.node_count(); j += 5)
                worst = std::max(worst, std::abs(scaled.u.values[j] -
                                                 factor * base.u.values[j]) /
                                            std::max(1.0, factor * base.u.values[j]));
        }
        ok = ok && worst <= 1e-4;
        detail += "homogeneity rel " + std::to_string(worst) + "; ";
    }

    // energy monotonicity: solution energy below start, perturbations above
    {
        const ProblemData d = radial_data(1.0, 0.5, 2.0);
        SolveParams sp;
        sp.p = 1.3;
        const SolveResult res = solve_p(m, d, sp);
        const double e0 = energy(m, d, Field(m), sp).total();
        bool mono = res.converged && res.energy.total() < e0;
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> val(-1.0, 1.0);
        for (int t = 0; t < 5 && mono; ++t) {
            Field w = res.u;
            for (double& v : w.values) v += 1e-3 * val(rng);
            if (energy(m, d, w, sp).total() < res.energy.total() - 1e-12) mono = false;
        }
        ok = ok && mono;
        detail += "energy monotone=" + std::to_string(mono) + "; ";
    }

    const double elapsed = seconds_since(t0);
    ok = ok && elapsed <= 60.0;
    report(9, ok, detail + std::to_string(elapsed) + " s");
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    std::printf("ACCEPTANCE: %s (%d failing)\n", failures == 0 ? "PASS" : "FAIL",
                failures);
    return failures;
}
