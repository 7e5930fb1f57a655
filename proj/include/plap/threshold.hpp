#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "plap/core.hpp"
#include "plap/mesh.hpp"
#include "plap/radial.hpp"

namespace plap {

/// Numerator of M: int f u + int_boundary g u.
inline double linear_functional(const Mesh& m, const ProblemData& d, const Field& u) {
    bind_check(m, u);
    const auto fl = source_load(m, d);
    const auto gl = boundary_load(m, d);
    double s = 0.0;
    for (int j = 0; j < m.node_count(); ++j) s += (fl[j] + gl[j]) * u.values[j];
    return s;
}

/// Closed form for the ball: max{A/(N-1), (A/(N-1) + gamma)/lambda}.
inline double radial_M(int N, double R, double A, double gamma, double lambda) {
    if (N < 2) throw std::invalid_argument("radial_M: N must be >= 2");
    if (!(lambda > 0.0)) throw std::invalid_argument("radial_M: lambda must be > 0");
    if (A < 0.0 || gamma < 0.0) throw std::invalid_argument("radial_M: A, gamma must be >= 0");
    (void)R;  // the value does not depend on R
    const double a = A / (N - 1);
    return std::max(a, (a + gamma) / lambda);
}

/// Lower bound min{lambda,1} N / R for the limit eigenvalue, with R the
/// radius of the ball of equal volume.
inline double eigen_lower_bound(const Mesh& m, double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("eigen_lower_bound: lambda must be >= 0");
    const int N = m.ambient_dim;
    const double ball_volume_unit = unit_sphere_area(N) / N;  // |B_1|
    const double R = std::pow(m.volume() / ball_volume_unit, 1.0 / N);
    return std::min(lambda, 1.0) * N / R;
}

/// Discrete limit functional: int|Du| + boundary weight - int f u. With
/// lambda_cap the boundary weight is min{lambda,1}|u| (constant-lambda, g=0
/// form); otherwise T_1(lambda sign u - g) u.
inline double limit_energy(const Mesh& m, const ProblemData& d, const Field& u,
                           bool lambda_cap) {
    bind_check(m, u);
    GradientOperator grad(m);
    double J = 0.0;
    for (int e = 0; e < m.element_count(); ++e) {
        const Vec2 g = grad.apply(e, u.values);
        J += std::hypot(g[0], g[1]) * m.elements[e].measure;
    }
    const auto lam = lambda_values(m, d);
    const auto gb = g_values(m, d);
    for (int b = 0; b < m.boundary_node_count(); ++b) {
        const double ub = u.values[m.boundary_nodes[b]];
        const double w = m.boundary_weights[b];
        if (lambda_cap)
            J += std::min(lam[b], 1.0) * std::abs(ub) * w;
        else if (ub != 0.0)
            J += truncate(lam[b] * sgn(ub) - gb[b], 1.0) * ub * w;
    }
    const auto fl = source_load(m, d);
    for (int j = 0; j < m.node_count(); ++j) J -= fl[j] * u.values[j];
    return J;
}

struct ThresholdOptions {
    int inner_iters{500};
    int outer_iters{50};
    int polish_sweeps{50};
    double tol{1e-9};
    unsigned seed{0};
};

struct ThresholdReport {
    double M_lower{};
    Field certificate;
    enum class Method { Dinkelbach, RadialClosedForm, SlopeRegression };
    Method method{Method::Dinkelbach};
    int iterations{};
    bool converged{false};
    bool zero_functional{false};
};

namespace threshold_detail {

/// Shared evaluation state for the ratio L(u) / ||u||_lambda.
struct Ratio {
    const Mesh* mesh;
    GradientOperator grad;
    std::vector<double> c;       // numerator weights per node
    std::vector<double> lamw;    // lambda_b * w_b per boundary node
    std::vector<std::vector<int>> node_elems;

    Ratio(const Mesh& m, const ProblemData& d) : mesh(&m), grad(m) {
        const auto fl = source_load(m, d);
        const auto gl = boundary_load(m, d);
        c.resize(m.node_count());
        for (int j = 0; j < m.node_count(); ++j) c[j] = fl[j] + gl[j];
        const auto lam = lambda_values(m, d);
        lamw.resize(lam.size());
        for (size_t b = 0; b < lam.size(); ++b) lamw[b] = lam[b] * m.boundary_weights[b];
        node_elems.resize(m.node_count());
        const int nv = m.element_node_count();
        for (int e = 0; e < m.element_count(); ++e)
            for (int v = 0; v < nv; ++v) node_elems[m.elements[e].v[v]].push_back(e);
    }

    double numerator(const std::vector<double>& u) const {
        double s = 0.0;
        for (size_t j = 0; j < u.size(); ++j) s += c[j] * u[j];
        return s;
    }

    double norm(const std::vector<double>& u) const {
        double s = 0.0;
        for (int e = 0; e < mesh->element_count(); ++e) {
            const Vec2 g = grad.apply(e, u);
            s += std::hypot(g[0], g[1]) * mesh->elements[e].measure;
        }
        for (int b = 0; b < mesh->boundary_node_count(); ++b)
            s += lamw[b] * std::abs(u[mesh->boundary_nodes[b]]);
        return s;
    }

    double value(const std::vector<double>& u) const {
        const double den = norm(u);
        return den > 0.0 ? numerator(u) / den : 0.0;
    }
};

/// Exact maximizer of c.u - t ||u||_lambda over the box |u|<=1 on a 1D chain.
/// A maximizer exists with every nodal value in {-1, 0, 1}, so a three-label
/// dynamic program along the chain is exact.
struct ChainMax {
    std::vector<double> u;
    double value{};
};

inline ChainMax chain_box_max(const Mesh& m, const Ratio& ratio, double t) {
    const int n = m.node_count();
    static constexpr double labels[3] = {-1.0, 0.0, 1.0};

    auto node_term = [&](int j, double v) {
        double s = ratio.c[j] * v;
        const int bi = m.node_boundary_index[j];
        if (bi >= 0) s -= t * ratio.lamw[bi] * std::abs(v);
        return s;
    };
    // edge weight between consecutive nodes: t * m_e / h_e
    std::vector<double> W(n - 1);
    for (int e = 0; e < m.element_count(); ++e) {
        const auto& el = m.elements[e];
        const double h = m.nodes[el.v[1]][0] - m.nodes[el.v[0]][0];
        W[el.v[0]] = t * el.measure / h;
    }

    std::vector<std::array<double, 3>> V(n);
    std::vector<std::array<int, 3>> back(n);
    for (int l = 0; l < 3; ++l) V[0][l] = node_term(0, labels[l]);
    for (int j = 1; j < n; ++j) {
        for (int l = 0; l < 3; ++l) {
            double best = -std::numeric_limits<double>::infinity();
            int arg = 0;
            for (int lp = 0; lp < 3; ++lp) {
                const double cand =
                    V[j - 1][lp] - W[j - 1] * std::abs(labels[l] - labels[lp]);
                if (cand > best) {
                    best = cand;
                    arg = lp;
                }
            }
            V[j][l] = best + node_term(j, labels[l]);
            back[j][l] = arg;
        }
    }
    ChainMax out;
    int l = 0;
    out.value = V[n - 1][0];
    for (int c = 1; c < 3; ++c)
        if (V[n - 1][c] > out.value) {
            out.value = V[n - 1][c];
            l = c;
        }
    out.u.assign(n, 0.0);
    for (int j = n - 1; j >= 0; --j) {
        out.u[j] = labels[l];
        if (j > 0) l = back[j][l];
    }
    return out;
}

/// Projected subgradient ascent on c.u - t||u||_lambda over the box, keeping
/// the best ratio iterate seen.
inline void subgradient_ascent(const Mesh& m, const Ratio& ratio, double t,
                               std::vector<double>& u, int iters,
                               std::vector<double>& best_u, double& best_ratio) {
    const int n = m.node_count();
    std::vector<double> g(n);
    for (int it = 1; it <= iters; ++it) {
        std::fill(g.begin(), g.end(), 0.0);
        for (int j = 0; j < n; ++j) g[j] = ratio.c[j];
        const int nv = m.element_node_count();
        for (int e = 0; e < m.element_count(); ++e) {
            const Vec2 gr = ratio.grad.apply(e, u);
            const double gn = std::hypot(gr[0], gr[1]);
            if (gn < 1e-14) continue;
            const double coef = t * m.elements[e].measure / gn;
            const auto& el = m.elements[e];
            for (int c = 0; c < nv; ++c) {
                const Vec2& gp = ratio.grad.grad_phi[e][c];
                g[el.v[c]] -= coef * (gr[0] * gp[0] + gr[1] * gp[1]);
            }
        }
        for (int b = 0; b < m.boundary_node_count(); ++b) {
            const int j = m.boundary_nodes[b];
            g[j] -= t * ratio.lamw[b] * sgn(u[j]);
        }
        double gmax = 0.0;
        for (double v : g) gmax = std::max(gmax, std::abs(v));
        if (gmax == 0.0) break;
        const double step = 1.0 / (gmax * std::sqrt(static_cast<double>(it)));
        for (int j = 0; j < n; ++j)
            u[j] = std::clamp(u[j] + step * g[j], -1.0, 1.0);
        const double r = ratio.value(u);
        if (r > best_ratio) {
            best_ratio = r;
            best_u = u;
        }
    }
}

/// Cyclic coordinate ascent on the ratio itself. Candidate values per node:
/// the box bounds, zero, and the current values of its element neighbours
/// (the breakpoints of the piecewise-linear denominator).
inline bool polish(const Mesh& m, const Ratio& ratio, std::vector<double>& u,
                   double& best_ratio, int sweeps) {
    const int n = m.node_count();
    const int nv = m.element_node_count();
    double num = ratio.numerator(u);
    double den = ratio.norm(u);
    if (den <= 0.0) return false;
    bool improved_any = false;

    std::vector<double> cand;
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        bool improved = false;
        for (int j = 0; j < n; ++j) {
            cand.clear();
            cand.push_back(-1.0);
            cand.push_back(0.0);
            cand.push_back(1.0);
            for (int e : ratio.node_elems[j]) {
                const auto& el = m.elements[e];
                for (int c = 0; c < nv; ++c)
                    if (el.v[c] != j) cand.push_back(u[el.v[c]]);
            }
            const double uj0 = u[j];
            // current local contributions
            double den_loc0 = 0.0;
            for (int e : ratio.node_elems[j]) {
                const Vec2 g = ratio.grad.apply(e, u);
                den_loc0 += std::hypot(g[0], g[1]) * m.elements[e].measure;
            }
            const int bi = m.node_boundary_index[j];
            if (bi >= 0) den_loc0 += ratio.lamw[bi] * std::abs(uj0);

            double best_v = uj0, best_r = num / den;
            for (double v : cand) {
                if (v == uj0 || std::abs(v) > 1.0) continue;
                u[j] = v;
                double den_loc = 0.0;
                for (int e : ratio.node_elems[j]) {
                    const Vec2 g = ratio.grad.apply(e, u);
                    den_loc += std::hypot(g[0], g[1]) * m.elements[e].measure;
                }
                if (bi >= 0) den_loc += ratio.lamw[bi] * std::abs(v);
                const double num_v = num + ratio.c[j] * (v - uj0);
                const double den_v = den - den_loc0 + den_loc;
                u[j] = uj0;
                if (den_v > 0.0 && num_v / den_v > best_r * (1.0 + 1e-15)) {
                    best_r = num_v / den_v;
                    best_v = v;
                }
            }
            if (best_v != uj0) {
                double den_loc = 0.0;
                u[j] = best_v;
                for (int e : ratio.node_elems[j]) {
                    const Vec2 g = ratio.grad.apply(e, u);
                    den_loc += std::hypot(g[0], g[1]) * m.elements[e].measure;
                }
                if (bi >= 0) den_loc += ratio.lamw[bi] * std::abs(best_v);
                num += ratio.c[j] * (best_v - uj0);
                den = den - den_loc0 + den_loc;
                improved = true;
                improved_any = true;
            }
        }
        if (!improved) break;
    }
    const double r = num / den;
    if (r > best_ratio) best_ratio = r;
    return improved_any;
}

}  // namespace threshold_detail

/// Dual-norm threshold estimate: Dinkelbach iteration on the quasi-concave
/// ratio, with the box |u|<=1 compactifying the homogeneous problem. The
/// returned M_lower is the ratio at the certificate, hence a certified lower
/// bound of the discrete supremum.
inline ThresholdReport estimate_M(const Mesh& m, const ProblemData& d,
                                  const ThresholdOptions& opts = {}) {
    if (lambda_identically_zero(m, d))
        throw std::invalid_argument("estimate_M: lambda must not be identically zero");

    threshold_detail::Ratio ratio(m, d);
    const int n = m.node_count();

    ThresholdReport rep;
    rep.method = ThresholdReport::Method::Dinkelbach;
    rep.certificate = Field(m, 1.0);

    double cscale = 0.0;
    for (double v : ratio.c) cscale = std::max(cscale, std::abs(v));
    if (cscale <= 0.0) {
        rep.M_lower = 0.0;
        rep.zero_functional = true;
        rep.converged = true;
        return rep;
    }

    // sign pattern of the lumped numerator weights
    std::vector<double> u(n);
    for (int j = 0; j < n; ++j) u[j] = ratio.c[j] > 0.0 ? 1.0 : (ratio.c[j] < 0.0 ? -1.0 : 0.0);
    if (ratio.norm(u) <= 0.0) std::fill(u.begin(), u.end(), 1.0);

    std::vector<double> best_u = u;
    double best_ratio = ratio.value(u);

    if (m.kind == Mesh::Kind::Radial1D) {
        // exact inner maximization along the chain
        double t = best_ratio;
        for (int it = 0; it < 100; ++it) {
            rep.iterations = it + 1;
            auto inner = threshold_detail::chain_box_max(m, ratio, t);
            const double scale = cscale + std::abs(t) + 1.0;
            if (inner.value <= 1e-13 * scale) {
                rep.converged = true;
                break;
            }
            const double r = ratio.value(inner.u);
            if (r > best_ratio) {
                best_ratio = r;
                best_u = inner.u;
            }
            if (r <= t * (1.0 + 1e-15)) {
                rep.converged = true;
                break;
            }
            t = r;
        }
    } else {
        double t = best_ratio;
        for (int it = 0; it < opts.outer_iters; ++it) {
            rep.iterations = it + 1;
            std::vector<double> w = best_u;
            threshold_detail::subgradient_ascent(m, ratio, t, w, opts.inner_iters,
                                                 best_u, best_ratio);
            threshold_detail::polish(m, ratio, best_u, best_ratio, opts.polish_sweeps);
            if (best_ratio <= t * (1.0 + opts.tol) && it > 0) {
                rep.converged = true;
                break;
            }
            t = best_ratio;
        }
    }

    rep.certificate.values = best_u;
    rep.M_lower = ratio.value(best_u);
    return rep;
}

}  // namespace plap
