#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "plap/core.hpp"
#include "plap/mesh.hpp"
#include "plap/util.hpp"

namespace plap {

struct SolveParams {
    double p{2.0};
    double epsilon{1e-8};
    double newton_tol{1e-10};
    int max_iters{200};
    double armijo_c{1e-4};
    int max_backtracks{60};
    double cg_tol{1e-10};
    // Residual level still accepted as converged when the line search
    // stagnates (energy improvements below double resolution). Near p = 1
    // the Hessian conditioning puts a floor on the reachable residual.
    double stall_tol{1e-6};        // relative
    int cg_max_iters{0};         // 0 -> 10 n
    double overflow_guard{std::numeric_limits<double>::infinity()};
};

struct EnergyBreakdown {
    double grad_term{};             // (1/p) int (|grad u|^2 + eps^2)^{p/2}
    double boundary_term{};         // (1/p) int_b lambda (u^2 + eps^2)^{p/2}
    double source_term{};           // int f u
    double boundary_source_term{};  // int_b g u
    double total() const {
        return grad_term + boundary_term - source_term - boundary_source_term;
    }
};

enum class SolveStatus { Converged, MaxItersExceeded, LinearSolveBreakdown, Overflow };

struct SolveResult {
    Field u;
    int iterations{};
    double final_residual{std::numeric_limits<double>::infinity()};
    EnergyBreakdown energy;
    bool converged{false};
    SolveStatus status{SolveStatus::MaxItersExceeded};
    double p{};
    double epsilon{};
};

namespace detail {

// pow(t, e) with a floor that keeps (p-4)/2 powers of near-underflow
// arguments finite in double precision
inline double safe_pow(double t, double e) {
    return std::pow(std::max(t, 1e-290), e);
}

/// Preassembled discrete problem for one (mesh, data) pair.
struct Assembly {
    const Mesh* mesh;
    GradientOperator grad;
    std::vector<double> f_load;      // per node
    std::vector<double> g_load;      // per node (0 off boundary)
    std::vector<double> lambda;      // per boundary node
    std::vector<double> bweight;     // per boundary node

    Assembly(const Mesh& m, const ProblemData& d)
        : mesh(&m),
          grad(m),
          f_load(source_load(m, d)),
          g_load(boundary_load(m, d)),
          lambda(lambda_values(m, d)),
          bweight(m.boundary_weights) {}

    EnergyBreakdown energy(const std::vector<double>& u, double p, double eps) const {
        EnergyBreakdown e;
        for (int el = 0; el < mesh->element_count(); ++el) {
            const Vec2 g = grad.apply(el, u);
            const double t = g[0] * g[0] + g[1] * g[1] + eps * eps;
            e.grad_term += mesh->elements[el].measure * std::pow(t, 0.5 * p) / p;
        }
        for (int b = 0; b < mesh->boundary_node_count(); ++b) {
            const double ub = u[mesh->boundary_nodes[b]];
            e.boundary_term += lambda[b] * bweight[b] *
                               std::pow(ub * ub + eps * eps, 0.5 * p) / p;
        }
        for (size_t j = 0; j < u.size(); ++j) {
            e.source_term += f_load[j] * u[j];
            e.boundary_source_term += g_load[j] * u[j];
        }
        return e;
    }

    // Weak-form residual tested against each nodal basis function.
    std::vector<double> gradient(const std::vector<double>& u, double p, double eps) const {
        const int n = static_cast<int>(u.size());
        const int ne = mesh->element_count();
        const int nv = mesh->element_node_count();

        const int workers = plan_workers(ne);
        std::vector<std::vector<double>> buffers(workers, std::vector<double>(n, 0.0));
        parallel_for_chunks(ne, [&](int w, int begin, int end) {
            auto& out = buffers[w];
            for (int el = begin; el < end; ++el) {
                const Vec2 g = grad.apply(el, u);
                const double t = g[0] * g[0] + g[1] * g[1] + eps * eps;
                const double coef = mesh->elements[el].measure * safe_pow(t, 0.5 * p - 1.0);
                const auto& e = mesh->elements[el];
                for (int c = 0; c < nv; ++c) {
                    const Vec2& gp = grad.grad_phi[el][c];
                    out[e.v[c]] += coef * (g[0] * gp[0] + g[1] * gp[1]);
                }
            }
        });
        std::vector<double> r(n, 0.0);
        for (const auto& buf : buffers)
            for (int j = 0; j < n; ++j) r[j] += buf[j];

        for (int b = 0; b < mesh->boundary_node_count(); ++b) {
            const int j = mesh->boundary_nodes[b];
            const double ub = u[j];
            r[j] += lambda[b] * bweight[b] *
                    safe_pow(ub * ub + eps * eps, 0.5 * p - 1.0) * ub;
        }
        for (int j = 0; j < n; ++j) r[j] -= f_load[j] + g_load[j];
        return r;
    }

    // v -> H(u) v for the (positive definite) regularized energy Hessian.
    std::vector<double> hessian_apply(const std::vector<double>& u, double p, double eps,
                                      const std::vector<double>& v) const {
        const int n = static_cast<int>(u.size());
        const int nv = mesh->element_node_count();
        std::vector<double> out(n, 0.0);
        for (int el = 0; el < mesh->element_count(); ++el) {
            const Vec2 g = grad.apply(el, u);
            const Vec2 gv = grad.apply(el, v);
            const double t = g[0] * g[0] + g[1] * g[1] + eps * eps;
            const double a = safe_pow(t, 0.5 * p - 1.0);
            const double bq = (p - 2.0) * safe_pow(t, 0.5 * p - 2.0);
            const double gdotgv = g[0] * gv[0] + g[1] * gv[1];
            const double m = mesh->elements[el].measure;
            const auto& e = mesh->elements[el];
            for (int c = 0; c < nv; ++c) {
                const Vec2& gp = grad.grad_phi[el][c];
                out[e.v[c]] += m * (a * (gv[0] * gp[0] + gv[1] * gp[1]) +
                                    bq * gdotgv * (g[0] * gp[0] + g[1] * gp[1]));
            }
        }
        for (int b = 0; b < mesh->boundary_node_count(); ++b) {
            const int j = mesh->boundary_nodes[b];
            const double ub = u[j];
            const double t = ub * ub + eps * eps;
            const double diag = lambda[b] * bweight[b] *
                                (safe_pow(t, 0.5 * p - 1.0) +
                                 (p - 2.0) * safe_pow(t, 0.5 * p - 2.0) * ub * ub);
            out[j] += diag * v[j];
        }
        return out;
    }

    std::vector<double> hessian_diag(const std::vector<double>& u, double p, double eps) const {
        const int n = static_cast<int>(u.size());
        const int nv = mesh->element_node_count();
        std::vector<double> diag(n, 0.0);
        for (int el = 0; el < mesh->element_count(); ++el) {
            const Vec2 g = grad.apply(el, u);
            const double t = g[0] * g[0] + g[1] * g[1] + eps * eps;
            const double a = safe_pow(t, 0.5 * p - 1.0);
            const double bq = (p - 2.0) * safe_pow(t, 0.5 * p - 2.0);
            const double m = mesh->elements[el].measure;
            const auto& e = mesh->elements[el];
            for (int c = 0; c < nv; ++c) {
                const Vec2& gp = grad.grad_phi[el][c];
                const double gdot = g[0] * gp[0] + g[1] * gp[1];
                diag[e.v[c]] += m * (a * (gp[0] * gp[0] + gp[1] * gp[1]) + bq * gdot * gdot);
            }
        }
        for (int b = 0; b < mesh->boundary_node_count(); ++b) {
            const int j = mesh->boundary_nodes[b];
            const double ub = u[j];
            const double t = ub * ub + eps * eps;
            diag[j] += lambda[b] * bweight[b] *
                       (safe_pow(t, 0.5 * p - 1.0) +
                        (p - 2.0) * safe_pow(t, 0.5 * p - 2.0) * ub * ub);
        }
        return diag;
    }
};

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double max_abs(const std::vector<double>& a) {
    double s = 0.0;
    for (double v : a) s = std::max(s, std::abs(v));
    return s;
}

/// Jacobi-preconditioned CG for H x = rhs. Returns false on breakdown.
inline bool pcg(const Assembly& asmb, const std::vector<double>& u, double p, double eps,
                const std::vector<double>& rhs, std::vector<double>& x,
                double rel_tol, int max_iters) {
    const int n = static_cast<int>(rhs.size());
    auto diag = asmb.hessian_diag(u, p, eps);
    for (double& d : diag)
        if (!(d > 0.0)) return false;

    x.assign(n, 0.0);
    std::vector<double> r = rhs;
    std::vector<double> z(n), q;
    for (int j = 0; j < n; ++j) z[j] = r[j] / diag[j];
    std::vector<double> d = z;
    double rz = dot(r, z);
    const double rhs_norm = std::sqrt(dot(rhs, rhs));
    if (rhs_norm == 0.0) return true;

    for (int it = 0; it < max_iters; ++it) {
        q = asmb.hessian_apply(u, p, eps, d);
        const double dq = dot(d, q);
        if (!(dq > 0.0) || !std::isfinite(dq)) return false;
        const double alpha = rz / dq;
        for (int j = 0; j < n; ++j) {
            x[j] += alpha * d[j];
            r[j] -= alpha * q[j];
        }
        if (std::sqrt(dot(r, r)) <= rel_tol * rhs_norm) return true;
        for (int j = 0; j < n; ++j) z[j] = r[j] / diag[j];
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int j = 0; j < n; ++j) d[j] = z[j] + beta * d[j];
    }
    // not fully converged; accept the iterate, Newton's line search copes
    return true;
}

}  // namespace detail

/// The four energy terms of the regularized functional at u.
inline EnergyBreakdown energy(const Mesh& m, const ProblemData& d, const Field& u,
                              const SolveParams& params) {
    if (!(params.p > 1.0)) throw std::invalid_argument("energy: p must be > 1");
    if (params.epsilon < 0.0) throw std::invalid_argument("energy: epsilon must be >= 0");
    bind_check(m, u);
    detail::Assembly asmb(m, d);
    return asmb.energy(u.values, params.p, params.epsilon);
}

/// Nodal gradient of the energy: component j is the weak-form residual tested
/// against basis function phi_j.
inline Field energy_gradient(const Mesh& m, const ProblemData& d, const Field& u,
                             const SolveParams& params) {
    if (!(params.p > 1.0)) throw std::invalid_argument("energy_gradient: p must be > 1");
    bind_check(m, u);
    detail::Assembly asmb(m, d);
    Field out(m);
    out.values = asmb.gradient(u.values, params.p, params.epsilon);
    return out;
}

/// Damped Newton on the strictly convex regularized energy. The converged
/// result is its unique minimizer.
inline SolveResult solve_p(const Mesh& m, const ProblemData& d, const SolveParams& params,
                           const std::optional<Field>& initial_guess = std::nullopt) {
    if (!(params.p > 1.0 && params.p <= 2.0))
        throw std::invalid_argument("solve_p: need 1 < p <= 2");
    if (!(params.epsilon > 0.0)) throw std::invalid_argument("solve_p: epsilon must be > 0");
    if (lambda_identically_zero(m, d))
        throw std::invalid_argument("solve_p: lambda must not be identically zero");

    const double p = params.p, eps = params.epsilon;
    detail::Assembly asmb(m, d);
    const int n = m.node_count();
    const int cg_max = params.cg_max_iters > 0 ? params.cg_max_iters : 10 * n;

    SolveResult res;
    res.p = p;
    res.epsilon = eps;
    res.u = initial_guess ? *initial_guess : Field(m);
    bind_check(m, res.u);
    auto& u = res.u.values;

    auto eb = asmb.energy(u, p, eps);
    double E = eb.total();
    std::vector<double> g = asmb.gradient(u, p, eps);
    res.final_residual = detail::max_abs(g);

    std::vector<double> best_u = u;
    double best_resid = res.final_residual;
    auto best_eb = eb;
    int stagnant = 0;

    for (int it = 0; it < params.max_iters; ++it) {
        if (stagnant >= 20) {
            res.status = SolveStatus::MaxItersExceeded;
            break;
        }
        if (res.final_residual <= params.newton_tol) {
            res.converged = true;
            res.status = SolveStatus::Converged;
            break;
        }
        if (res.u.sup_norm() > params.overflow_guard) {
            res.status = SolveStatus::Overflow;
            break;
        }

        std::vector<double> rhs(n);
        for (int j = 0; j < n; ++j) rhs[j] = -g[j];
        std::vector<double> delta;
        if (!detail::pcg(asmb, u, p, eps, rhs, delta, params.cg_tol, cg_max)) {
            res.status = SolveStatus::LinearSolveBreakdown;
            break;
        }

        const double slope = detail::dot(g, delta);  // < 0 for a descent direction
        double step = 1.0;
        bool accepted = false;
        std::vector<double> trial(n);
        EnergyBreakdown eb_trial;
        for (int bt = 0; bt <= params.max_backtracks; ++bt) {
            for (int j = 0; j < n; ++j) trial[j] = u[j] + step * delta[j];
            eb_trial = asmb.energy(trial, p, eps);
            const double Et = eb_trial.total();
            // Armijo, with a roundoff allowance for energies whose decrease
            // falls below double resolution
            if (std::isfinite(Et) &&
                (Et <= E + params.armijo_c * step * slope ||
                 Et <= E + 1e-14 * std::abs(E))) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            res.status = SolveStatus::MaxItersExceeded;
            res.iterations = it + 1;
            break;
        }
        u = trial;
        E = eb_trial.total();
        eb = eb_trial;
        g = asmb.gradient(u, p, eps);
        res.final_residual = detail::max_abs(g);
        res.iterations = it + 1;
        if (res.final_residual < 0.9 * best_resid) {
            stagnant = 0;
        } else {
            ++stagnant;
        }
        if (res.final_residual < best_resid) {
            best_resid = res.final_residual;
            best_u = u;
            best_eb = eb;
        }
    }

    if (!res.converged && res.final_residual <= params.newton_tol &&
        res.status != SolveStatus::Overflow) {
        res.converged = true;
        res.status = SolveStatus::Converged;
    }
    // stagnation fallback: the line search can no longer improve the energy
    // but the best iterate is already accurate at the stall tolerance
    if (!res.converged && res.status != SolveStatus::Overflow &&
        best_resid <= params.stall_tol) {
        res.u.values = best_u;
        res.final_residual = best_resid;
        eb = best_eb;
        res.converged = true;
        res.status = SolveStatus::Converged;
    }
    res.energy = eb;
    return res;
}

}  // namespace plap
