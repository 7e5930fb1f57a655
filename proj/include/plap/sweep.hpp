#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "plap/core.hpp"
#include "plap/fields.hpp"
#include "plap/mesh.hpp"
#include "plap/radial.hpp"
#include "plap/solver.hpp"

namespace plap {

struct SweepParams {
    std::vector<double> p_schedule;  // empty -> 1 + 2^-j, j = 1..7
    SolveParams base;                // p/epsilon/overflow_guard set per step
    double overflow_guard{1e12};
    double epsilon_scale{1e-8};      // epsilon = scale * solution amplitude
    double truncation_level{1.0};
};

inline std::vector<double> default_p_schedule(int levels = 7) {
    if (levels < 1) throw std::invalid_argument("default_p_schedule: levels must be >= 1");
    std::vector<double> p;
    for (int j = 1; j <= levels; ++j) p.push_back(1.0 + std::ldexp(1.0, -j));
    return p;
}

struct SweepRecord {
    double p{};
    double epsilon{};
    double norm_lambda{};
    double log_norm_lambda{-std::numeric_limits<double>::infinity()};
    double sup_norm{};
    double grad_term{};
    double boundary_term{};
    double flux_sup{};
    double truncated_flux_sup{};
    int iterations{};
    bool converged{false};
    bool overflow{false};
};

enum class Verdict { Degenerate, Finite, BlowUp, Inconclusive };

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Degenerate: return "Degenerate";
        case Verdict::Finite: return "Finite";
        case Verdict::BlowUp: return "BlowUp";
        default: return "Inconclusive";
    }
}

struct SlopeFit {
    double M_estimate{};
    double r_squared{};
    int points{};
    bool degenerate_fit{false};  // all norms at noise level, estimate pinned to 0
    bool valid{false};
};

struct SweepReport {
    std::vector<SweepRecord> records;
    SlopeFit fit;
    Verdict verdict{Verdict::Inconclusive};
    bool overflowed{false};
    Field last_solution;
};

/// Least-squares fit of log||u_p||_lambda against s = 1/(p-1) over the
/// smallest-p half of the usable records; the norm grows like M^s, so
/// exp(slope) estimates M.
inline SlopeFit estimate_M_slope(const std::vector<SweepRecord>& records) {
    SlopeFit fit;
    std::vector<double> s, y;
    int usable = 0;
    bool all_tiny = true;
    for (const auto& r : records) {
        if (!r.converged || r.overflow) continue;
        ++usable;
        if (r.log_norm_lambda > std::log(1e-12)) all_tiny = false;
        if (!std::isfinite(r.log_norm_lambda)) continue;
        s.push_back(1.0 / (r.p - 1.0));
        y.push_back(r.log_norm_lambda);
    }
    if (all_tiny && usable > 0) {
        fit.M_estimate = 0.0;
        fit.r_squared = 1.0;
        fit.points = usable;
        fit.degenerate_fit = true;
        fit.valid = true;
        return fit;
    }
    // keep the half with the largest s (smallest p), at least 3 points
    const int n = static_cast<int>(s.size());
    const int keep = std::max(3, n / 2);
    if (n < 3) return fit;
    std::vector<double> sk(s.end() - std::min(keep, n), s.end());
    std::vector<double> yk(y.end() - std::min(keep, n), y.end());
    const int k = static_cast<int>(sk.size());
    double sm = 0.0, ym = 0.0;
    for (int i = 0; i < k; ++i) {
        sm += sk[i];
        ym += yk[i];
    }
    sm /= k;
    ym /= k;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (int i = 0; i < k; ++i) {
        sxx += (sk[i] - sm) * (sk[i] - sm);
        sxy += (sk[i] - sm) * (yk[i] - ym);
        syy += (yk[i] - ym) * (yk[i] - ym);
    }
    if (!(sxx > 0.0)) return fit;
    const double slope = sxy / sxx;
    fit.M_estimate = std::exp(slope);
    // near-constant log norms (spread below ~1%): a plateau, the fit is as
    // good as it can be and the slope is ~0
    fit.r_squared = (syy < 1e-4) ? 1.0 : (sxy * sxy) / (sxx * syy);
    fit.points = k;
    fit.valid = true;
    return fit;
}

/// Maps the slope estimate and overflow evidence to the trichotomy.
inline Verdict classify(const SweepReport& rep, double band = 0.05) {
    const auto& fit = rep.fit;
    if (rep.overflowed) {
        if (!fit.valid || fit.M_estimate > 1.0 - band) return Verdict::BlowUp;
        return Verdict::Inconclusive;
    }
    if (!fit.valid) return Verdict::Inconclusive;
    if (fit.r_squared < 0.99) return Verdict::Inconclusive;
    if (fit.M_estimate < 1.0 - band) return Verdict::Degenerate;
    if (fit.M_estimate > 1.0 + band) return Verdict::BlowUp;
    return Verdict::Finite;
}

/// Decreasing-p continuation: solve at each p of the schedule, warm-starting
/// from the power-rescaled previous solution sign(u)|u|^{(p_old-1)/(p_new-1)}.
/// Stops once a solve overflows; the report carries the per-p records, the
/// slope fit, and the verdict.
inline SweepReport run_sweep(const Mesh& m, const ProblemData& d,
                             const SweepParams& params = {}) {
    std::vector<double> schedule =
        params.p_schedule.empty() ? default_p_schedule() : params.p_schedule;
    for (size_t i = 0; i < schedule.size(); ++i) {
        if (!(schedule[i] > 1.0 + 1e-3 - 1e-12 && schedule[i] <= 2.0))
            throw std::invalid_argument("run_sweep: schedule entries must lie in (1+1e-3, 2]");
        if (i > 0 && !(schedule[i] < schedule[i - 1]))
            throw std::invalid_argument("run_sweep: schedule must be strictly decreasing");
    }

    // The solve at each p works on the amplitude-normalized problem: by the
    // homogeneity u(t f, t g) = t^{1/(p-1)} u(f, g), scaling the data by
    // exp(-L (p-1)) makes the expected solution O(1) while the true solution
    // is exp(L) times the computed one. L is tracked in log space, so both
    // decaying (Degenerate) and exploding (BlowUp) branches stay well inside
    // double range and the regularization epsilon is always relative to an
    // O(1) field.
    SweepReport rep;
    Field v;          // normalized previous solution
    double L = 0.0;   // log of the amplitude factor
    bool have_warm = false;
    double p_prev = 0.0;
    const double log_guard = std::log(params.overflow_guard);

    for (double p : schedule) {
        SolveParams sp = params.base;
        sp.p = p;
        sp.epsilon = params.epsilon_scale;
        // normalized problem is O(1): accept stalls at 1e-4 residual
        sp.stall_tol = std::max(sp.stall_tol, 1e-4);

        std::optional<Field> guess;
        if (have_warm) {
            const double e = (p_prev - 1.0) / (p - 1.0);
            Field g = v;
            for (double& x : g.values) x = sgn(x) * stable_pow(std::abs(x), e);
            double Lg = L * e;
            const double s = g.sup_norm();
            if (s > 0.0) {
                for (double& x : g.values) x /= s;
                Lg += std::log(s);
            }
            L = Lg;
            guess = std::move(g);
        }

        ProblemData scaled = d;
        const double data_scale = std::exp(-L * (p - 1.0));
        auto rescale_source = [&](SourceSpec& s) {
            s.value *= data_scale;
            for (double& x : s.table) x *= data_scale;
        };
        auto rescale_boundary = [&](BoundarySpec& s) {
            s.value *= data_scale;
            for (double& x : s.table) x *= data_scale;
        };
        rescale_source(scaled.f);
        rescale_boundary(scaled.g);

        SolveResult res = solve_p(m, scaled, sp, guess);

        SweepRecord rec;
        rec.p = p;
        rec.epsilon = sp.epsilon;
        rec.iterations = res.iterations;
        rec.converged = res.converged;
        const double sup = res.u.sup_norm();
        rec.sup_norm = sup * std::exp(L);
        const double nrm = norm_lambda(m, res.u, scaled);
        if (nrm > 0.0) rec.log_norm_lambda = std::log(nrm) + L;
        rec.norm_lambda = std::exp(rec.log_norm_lambda);
        rec.grad_term = res.energy.grad_term * std::exp(L * p);
        rec.boundary_term = res.energy.boundary_term * std::exp(L * p);
        if (res.converged) {
            const FluxField flux = extract_flux(m, scaled, res);
            // true flux = computed flux * exp(L)^{p-1}
            const double fscale = std::exp(L * (p - 1.0));
            rec.flux_sup = flux.sup_norm() * fscale;
            const double k_scaled = params.truncation_level * std::exp(-L);
            rec.truncated_flux_sup =
                (k_scaled > 0.0)
                    ? truncated_flux(m, res, flux, k_scaled).sup * fscale
                    : 0.0;
        }
        rec.overflow = res.status == SolveStatus::Overflow ||
                       (rec.log_norm_lambda > log_guard);
        rep.records.push_back(rec);
        rep.last_solution = res.u;
        for (double& x : rep.last_solution.values) x *= std::exp(L);

        if (rec.overflow) {
            rep.overflowed = true;
            break;
        }
        if (!res.converged) break;
        v = res.u;
        have_warm = true;
        p_prev = p;
    }
    rep.fit = estimate_M_slope(rep.records);
    rep.verdict = classify(rep);
    return rep;
}

}  // namespace plap
