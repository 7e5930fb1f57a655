#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "plap/core.hpp"
#include "plap/mesh.hpp"
#include "plap/solver.hpp"

namespace plap {

/// z_p = (|grad u|^2 + eps^2)^{(p-2)/2} grad u per element, its facet normal
/// trace, and the boundary companion beta_p = (u^2 + eps^2)^{(p-2)/2} u.
struct FluxField {
    std::vector<Vec2> element_flux;
    std::vector<double> facet_normal_trace;  // z . nu per facet
    std::vector<double> beta;                // per boundary node
    double p{};
    double epsilon{};

    double sup_norm() const {
        double s = 0.0;
        for (const auto& z : element_flux) s = std::max(s, std::hypot(z[0], z[1]));
        return s;
    }
};

inline FluxField extract_flux(const Mesh& m, const ProblemData& d, const SolveResult& result) {
    (void)d;
    if (!result.converged)
        throw std::invalid_argument("extract_flux: result did not converge");
    bind_check(m, result.u);

    FluxField flux;
    flux.p = result.p;
    flux.epsilon = result.epsilon;
    const double p = result.p, eps = result.epsilon;

    GradientOperator grad(m);
    flux.element_flux.resize(m.element_count());
    for (int e = 0; e < m.element_count(); ++e) {
        const Vec2 g = grad.apply(e, result.u.values);
        const double coef = detail::safe_pow(g[0] * g[0] + g[1] * g[1] + eps * eps,
                                             0.5 * p - 1.0);
        flux.element_flux[e] = {coef * g[0], coef * g[1]};
    }
    flux.facet_normal_trace.resize(m.facet_count());
    for (int f = 0; f < m.facet_count(); ++f) {
        const auto& fc = m.facets[f];
        const Vec2& z = flux.element_flux[fc.element];
        flux.facet_normal_trace[f] = z[0] * fc.normal[0] + z[1] * fc.normal[1];
    }
    flux.beta.resize(m.boundary_node_count());
    for (int b = 0; b < m.boundary_node_count(); ++b) {
        const double ub = result.u.values[m.boundary_nodes[b]];
        flux.beta[b] = detail::safe_pow(ub * ub + eps * eps, 0.5 * p - 1.0) * ub;
    }
    return flux;
}

namespace detail {

inline double abs_source_mass(const Mesh& m, const ProblemData& d) {
    ProblemData abs_d = d;
    if (abs_d.f.kind == SourceSpec::Kind::Constant)
        abs_d.f.value = std::abs(abs_d.f.value);
    else if (abs_d.f.kind == SourceSpec::Kind::Tabulated)
        for (double& v : abs_d.f.table) v = std::abs(v);
    // RadialSingular already has A >= 0
    double s = 0.0;
    for (double v : source_load(m, abs_d)) s += v;
    return s;
}

// facet-mean of a per-boundary-node quantity
inline double facet_mean(const Mesh& m, const std::vector<double>& per_bnode, int f) {
    const auto& fc = m.facets[f];
    const int nv = (fc.v[1] < 0) ? 1 : 2;
    double s = 0.0;
    for (int i = 0; i < nv; ++i) s += per_bnode[m.node_boundary_index[fc.v[i]]];
    return s / nv;
}

inline double facet_mean_nodal(const Mesh& m, const std::vector<double>& per_node, int f) {
    const auto& fc = m.facets[f];
    const int nv = (fc.v[1] < 0) ? 1 : 2;
    double s = 0.0;
    for (int i = 0; i < nv; ++i) s += per_node[fc.v[i]];
    return s / nv;
}

}  // namespace detail

/// Weak divergence residual: max over interior basis functions of
/// |int z.grad(phi_j) - int f phi_j|, normalized by int|f| + 1.
inline double check_divergence(const Mesh& m, const ProblemData& d, const FluxField& flux) {
    GradientOperator grad(m);
    const auto f_load = source_load(m, d);
    std::vector<double> resid(m.node_count(), 0.0);
    const int nv = m.element_node_count();
    for (int e = 0; e < m.element_count(); ++e) {
        const auto& el = m.elements[e];
        const Vec2& z = flux.element_flux[e];
        for (int c = 0; c < nv; ++c) {
            const Vec2& gp = grad.grad_phi[e][c];
            resid[el.v[c]] += el.measure * (z[0] * gp[0] + z[1] * gp[1]);
        }
    }
    double worst = 0.0;
    for (int j = 0; j < m.node_count(); ++j) {
        if (m.node_boundary_index[j] >= 0) continue;  // interior only
        worst = std::max(worst, std::abs(resid[j] - f_load[j]));
    }
    return worst / (detail::abs_source_mass(m, d) + 1.0);
}

/// max over boundary facets of |z.nu + lambda beta - g|.
inline double check_boundary_identity(const Mesh& m, const ProblemData& d,
                                      const FluxField& flux) {
    const auto lam = lambda_values(m, d);
    const auto g = g_values(m, d);
    double worst = 0.0;
    for (int f = 0; f < m.facet_count(); ++f) {
        const double zb = flux.facet_normal_trace[f];
        const double lb = detail::facet_mean(m, lam, f);
        const double bb = detail::facet_mean(m, flux.beta, f);
        const double gb = detail::facet_mean(m, g, f);
        worst = std::max(worst, std::abs(zb + lb * bb - gb));
    }
    return worst;
}

struct PairingGap {
    double gap{};          // sum(|grad u| - z.grad u) / sum |grad u|
    bool zero_gradient{};  // whole field constant, gap reported as 0
};

/// Discrete surrogate of the pairing identity (z, Du) = |Du|.
inline PairingGap check_pairing(const Mesh& m, const ProblemData& d,
                                const SolveResult& result, const FluxField& flux) {
    (void)d;
    bind_check(m, result.u);
    GradientOperator grad(m);
    double num = 0.0, den = 0.0;
    for (int e = 0; e < m.element_count(); ++e) {
        const Vec2 g = grad.apply(e, result.u.values);
        const double gn = std::hypot(g[0], g[1]);
        const Vec2& z = flux.element_flux[e];
        num += (gn - (z[0] * g[0] + z[1] * g[1])) * m.elements[e].measure;
        den += gn * m.elements[e].measure;
    }
    if (den <= 0.0) return {0.0, true};
    return {num / den, false};
}

/// max over boundary facets with |u| > zero_band of
/// |u| |z.nu + T_1(lambda sign(u) - g)| / sup|u|.
inline double check_complementarity(const Mesh& m, const ProblemData& d,
                                    const SolveResult& result, const FluxField& flux,
                                    double zero_band) {
    bind_check(m, result.u);
    const double sup = result.u.sup_norm();
    if (sup == 0.0) return 0.0;
    const auto lam = lambda_values(m, d);
    const auto g = g_values(m, d);
    double worst = 0.0;
    for (int f = 0; f < m.facet_count(); ++f) {
        const double uf = detail::facet_mean_nodal(m, result.u.values, f);
        if (std::abs(uf) <= zero_band) continue;
        const double lb = detail::facet_mean(m, lam, f);
        const double gb = detail::facet_mean(m, g, f);
        const double t = truncate(lb * sgn(uf) - gb, 1.0);
        worst = std::max(worst, std::abs(uf) * std::abs(flux.facet_normal_trace[f] + t) / sup);
    }
    return worst;
}

struct TruncatedFlux {
    std::vector<Vec2> element_flux;  // zeroed outside the mask
    std::vector<bool> mask;          // elements with all nodal |u| < k
    double sup{};
};

/// Flux masked to {|u| < k}: all nodal values of the element below level k.
inline TruncatedFlux truncated_flux(const Mesh& m, const SolveResult& result,
                                    const FluxField& flux, double k) {
    if (!(k > 0.0)) throw std::invalid_argument("truncated_flux: k must be > 0");
    bind_check(m, result.u);
    TruncatedFlux out;
    out.element_flux.assign(m.element_count(), Vec2{0.0, 0.0});
    out.mask.assign(m.element_count(), false);
    const int nv = m.element_node_count();
    for (int e = 0; e < m.element_count(); ++e) {
        const auto& el = m.elements[e];
        bool inside = true;
        for (int c = 0; c < nv; ++c)
            if (!(std::abs(result.u.values[el.v[c]]) < k)) inside = false;
        if (inside) {
            out.mask[e] = true;
            out.element_flux[e] = flux.element_flux[e];
            out.sup = std::max(out.sup, std::hypot(flux.element_flux[e][0],
                                                   flux.element_flux[e][1]));
        }
    }
    return out;
}

struct LimitCheckReport {
    double sup_norm_z{};
    double sup_norm_beta_on_lambda_pos{};
    double div_residual{};
    double boundary_residual{};
    double pairing_gap{};
    double complementarity_residual{};
    std::map<double, double> truncated_flux_sup;  // k -> sup
};

inline LimitCheckReport run_limit_checks(const Mesh& m, const ProblemData& d,
                                         const SolveResult& result,
                                         const std::vector<double>& ks = {1.0, 10.0}) {
    const FluxField flux = extract_flux(m, d, result);
    LimitCheckReport rep;
    rep.sup_norm_z = flux.sup_norm();
    const auto lam = lambda_values(m, d);
    for (int b = 0; b < m.boundary_node_count(); ++b)
        if (lam[b] > 0.0)
            rep.sup_norm_beta_on_lambda_pos =
                std::max(rep.sup_norm_beta_on_lambda_pos, std::abs(flux.beta[b]));
    rep.div_residual = check_divergence(m, d, flux);
    rep.boundary_residual = check_boundary_identity(m, d, flux);
    rep.pairing_gap = check_pairing(m, d, result, flux).gap;
    rep.complementarity_residual =
        check_complementarity(m, d, result, flux, default_zero_band(result.u));
    for (double k : ks)
        rep.truncated_flux_sup[k] = truncated_flux(m, result, flux, k).sup;
    return rep;
}

}  // namespace plap
