#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "plap/mesh.hpp"

namespace plap {

/// T_k clamp to [-k, k].
inline double truncate(double s, double k) {
    if (!(k > 0.0)) throw std::invalid_argument("truncate: k must be > 0");
    return std::max(-k, std::min(s, k));
}

inline double sgn(double s) { return (s > 0.0) - (s < 0.0); }

/// Nodal scalar function bound to a mesh.
struct Field {
    std::vector<double> values;
    std::string mesh_id;

    Field() = default;
    Field(const Mesh& m, double fill = 0.0)
        : values(m.nodes.size(), fill), mesh_id(m.id) {}

    double sup_norm() const {
        double s = 0.0;
        for (double v : values) s = std::max(s, std::abs(v));
        return s;
    }
};

inline void bind_check(const Mesh& m, const Field& u) {
    if (u.mesh_id != m.id || u.values.size() != m.nodes.size())
        throw std::invalid_argument("field is not bound to this mesh");
    for (double v : u.values)
        if (!std::isfinite(v)) throw std::invalid_argument("field has non-finite entries");
}

/// Volumetric source: constant c, radial-singular A/|x|, or tabulated nodal values.
struct SourceSpec {
    enum class Kind { Constant, RadialSingular, Tabulated };
    Kind kind{Kind::Constant};
    double value{0.0};           // c, or the coefficient A
    std::vector<double> table;   // per mesh node

    static SourceSpec constant(double c) { return {Kind::Constant, c, {}}; }
    static SourceSpec radial_singular(double A) {
        if (A < 0.0) throw std::invalid_argument("radial source: A must be >= 0");
        return {Kind::RadialSingular, A, {}};
    }
    static SourceSpec tabulated(std::vector<double> t) {
        return {Kind::Tabulated, 0.0, std::move(t)};
    }
};

/// Boundary data: constant or tabulated per boundary node (aligned with
/// Mesh::boundary_nodes).
struct BoundarySpec {
    enum class Kind { Constant, Tabulated };
    Kind kind{Kind::Constant};
    double value{0.0};
    std::vector<double> table;

    static BoundarySpec constant(double c) { return {Kind::Constant, c, {}}; }
    static BoundarySpec tabulated(std::vector<double> t) {
        return {Kind::Tabulated, 0.0, std::move(t)};
    }
};

/// The data triple (f, g, lambda).
struct ProblemData {
    SourceSpec f;
    BoundarySpec g;
    BoundarySpec lambda;
    bool lambda_integrable_only{false};
};

/// lambda evaluated at every boundary node.
inline std::vector<double> lambda_values(const Mesh& m, const ProblemData& d) {
    const int nb = m.boundary_node_count();
    std::vector<double> out(nb);
    if (d.lambda.kind == BoundarySpec::Kind::Constant) {
        std::fill(out.begin(), out.end(), d.lambda.value);
    } else {
        if (static_cast<int>(d.lambda.table.size()) != nb)
            throw std::invalid_argument("lambda table size mismatch");
        out = d.lambda.table;
    }
    for (double v : out)
        if (v < 0.0) throw std::invalid_argument("lambda must be nonnegative");
    return out;
}

inline std::vector<double> g_values(const Mesh& m, const ProblemData& d) {
    const int nb = m.boundary_node_count();
    std::vector<double> out(nb);
    if (d.g.kind == BoundarySpec::Kind::Constant) {
        std::fill(out.begin(), out.end(), d.g.value);
    } else {
        if (static_cast<int>(d.g.table.size()) != nb)
            throw std::invalid_argument("g table size mismatch");
        out = d.g.table;
    }
    return out;
}

/// True when lambda vanishes at every boundary node.
inline bool lambda_identically_zero(const Mesh& m, const ProblemData& d) {
    for (double v : lambda_values(m, d))
        if (v > 0.0) return false;
    return true;
}

namespace detail {

// int_a^b r^k dr
inline double power_integral(double a, double b, int k) {
    return (std::pow(b, k + 1) - std::pow(a, k + 1)) / (k + 1);
}

// Exact nodal load for a 1D cell [a,b] with weight w(r) = coeff * r^(N-1):
// adds int w(r) f(r) phi_j(r) dr for the two hat functions. f is either a
// pure power A r^alpha or piecewise linear (fa,fb).
struct Cell1D {
    double a, b, coeff;
    int N;

    double hat_left(int power_shift) const {
        // int coeff r^(N-1+shift) (b-r)/h dr
        const double h = b - a;
        return coeff * (b * power_integral(a, b, N - 1 + power_shift) -
                        power_integral(a, b, N + power_shift)) / h;
    }
    double hat_right(int power_shift) const {
        const double h = b - a;
        return coeff * (power_integral(a, b, N + power_shift) -
                        a * power_integral(a, b, N - 1 + power_shift)) / h;
    }
};

// 3-point edge-midpoint rule on a triangle, exact for quadratics.
template <typename F>
inline double tri_quad(const Vec2& A, const Vec2& B, const Vec2& C, double area, F&& f) {
    const Vec2 mab{0.5 * (A[0] + B[0]), 0.5 * (A[1] + B[1])};
    const Vec2 mbc{0.5 * (B[0] + C[0]), 0.5 * (B[1] + C[1])};
    const Vec2 mca{0.5 * (C[0] + A[0]), 0.5 * (C[1] + A[1])};
    return area / 3.0 * (f(mab) + f(mbc) + f(mca));
}

// Integrates A/|x| * phi over a triangle where phi is linear with nodal
// values (pa, pb, pc). Recursion refines toward the origin, which keeps the
// singular datum accurate on the innermost ring.
inline double singular_tri(const Vec2& A, const Vec2& B, const Vec2& C,
                           double pa, double pb, double pc, double coefA, int depth) {
    const double area2 = (B[0] - A[0]) * (C[1] - A[1]) - (B[1] - A[1]) * (C[0] - A[0]);
    const double area = 0.5 * std::abs(area2);
    const double ra = std::hypot(A[0], A[1]);
    const double rb = std::hypot(B[0], B[1]);
    const double rc = std::hypot(C[0], C[1]);
    const double rmin = std::min({ra, rb, rc});
    const double diam = std::max({std::hypot(B[0] - A[0], B[1] - A[1]),
                                  std::hypot(C[0] - B[0], C[1] - B[1]),
                                  std::hypot(A[0] - C[0], A[1] - C[1])});
    if (depth > 0 && rmin < 0.75 * diam) {
        const Vec2 mab{0.5 * (A[0] + B[0]), 0.5 * (A[1] + B[1])};
        const Vec2 mbc{0.5 * (B[0] + C[0]), 0.5 * (B[1] + C[1])};
        const Vec2 mca{0.5 * (C[0] + A[0]), 0.5 * (C[1] + A[1])};
        const double pab = 0.5 * (pa + pb), pbc = 0.5 * (pb + pc), pca = 0.5 * (pc + pa);
        return singular_tri(A, mab, mca, pa, pab, pca, coefA, depth - 1) +
               singular_tri(mab, B, mbc, pab, pb, pbc, coefA, depth - 1) +
               singular_tri(mca, mbc, C, pca, pbc, pc, coefA, depth - 1) +
               singular_tri(mab, mbc, mca, pab, pbc, pca, coefA, depth - 1);
    }
    // linear interpolation of phi at quadrature points
    auto phi = [&](const Vec2& P) {
        // barycentric via areas
        auto tri_a = [](const Vec2& X, const Vec2& Y, const Vec2& Z) {
            return 0.5 * ((Y[0] - X[0]) * (Z[1] - X[1]) - (Y[1] - X[1]) * (Z[0] - X[0]));
        };
        const double full = tri_a(A, B, C);
        const double la = tri_a(P, B, C) / full;
        const double lb = tri_a(A, P, C) / full;
        const double lc = 1.0 - la - lb;
        return la * pa + lb * pb + lc * pc;
    };
    return tri_quad(A, B, C, area, [&](const Vec2& P) {
        const double r = std::hypot(P[0], P[1]);
        return coefA / std::max(r, 1e-300) * phi(P);
    });
}

}  // namespace detail

/// Nodal load vector b_j = int_Omega f phi_j dx. Exact on Radial1D for the
/// constant and A/|x| specs (per-cell closed forms); 2D uses a quadratic
/// quadrature rule with refinement toward the origin for the singular datum.
inline std::vector<double> source_load(const Mesh& m, const ProblemData& d) {
    std::vector<double> load(m.nodes.size(), 0.0);
    const auto& spec = d.f;
    if (spec.kind == SourceSpec::Kind::Tabulated &&
        spec.table.size() != m.nodes.size())
        throw std::invalid_argument("f table size mismatch");
    if (spec.kind == SourceSpec::Kind::RadialSingular && spec.value < 0.0)
        throw std::invalid_argument("radial source: A must be >= 0");

    if (m.kind == Mesh::Kind::Radial1D) {
        const int N = m.ambient_dim;
        if (spec.kind == SourceSpec::Kind::RadialSingular && N < 2)
            throw std::invalid_argument("radial-singular source needs ambient dimension >= 2");
        for (int e = 0; e < m.element_count(); ++e) {
            const auto& el = m.elements[e];
            const double a = m.nodes[el.v[0]][0], b = m.nodes[el.v[1]][0];
            // weight coefficient recovered from the stored measure, so the
            // interval mesh (unit weight) flows through the same path
            const double coeff = el.measure / detail::power_integral(a, b, N - 1);
            detail::Cell1D cell{a, b, coeff, N};
            switch (spec.kind) {
                case SourceSpec::Kind::Constant:
                    load[el.v[0]] += spec.value * cell.hat_left(0);
                    load[el.v[1]] += spec.value * cell.hat_right(0);
                    break;
                case SourceSpec::Kind::RadialSingular:
                    load[el.v[0]] += spec.value * cell.hat_left(-1);
                    load[el.v[1]] += spec.value * cell.hat_right(-1);
                    break;
                case SourceSpec::Kind::Tabulated: {
                    // f is piecewise linear: f = fa*(b-r)/h + fb*(r-a)/h
                    const double fa = spec.table[el.v[0]], fb = spec.table[el.v[1]];
                    const double h = b - a;
                    // int w f phi_left and phi_right via power integrals
                    const double I0 = detail::power_integral(a, b, N - 1);
                    const double I1 = detail::power_integral(a, b, N);
                    const double I2 = detail::power_integral(a, b, N + 1);
                    const double bb = b * b, aa = a * a;
                    // phi_left*f = [fa(b-r)^2 + fb(r-a)(b-r)] / h^2
                    const double left = coeff / (h * h) *
                        (fa * (bb * I0 - 2.0 * b * I1 + I2) +
                         fb * (-a * b * I0 + (a + b) * I1 - I2));
                    const double right = coeff / (h * h) *
                        (fb * (aa * I0 - 2.0 * a * I1 + I2) +
                         fa * ((a + b) * I1 - I2 - a * b * I0));
                    load[el.v[0]] += left;
                    load[el.v[1]] += right;
                    break;
                }
            }
        }
    } else {
        for (int e = 0; e < m.element_count(); ++e) {
            const auto& el = m.elements[e];
            const Vec2 &A = m.nodes[el.v[0]], &B = m.nodes[el.v[1]], &C = m.nodes[el.v[2]];
            for (int c = 0; c < 3; ++c) {
                double pv[3] = {0.0, 0.0, 0.0};
                pv[c] = 1.0;
                double contrib = 0.0;
                switch (spec.kind) {
                    case SourceSpec::Kind::Constant:
                        contrib = spec.value * el.measure / 3.0;
                        break;
                    case SourceSpec::Kind::RadialSingular:
                        contrib = detail::singular_tri(A, B, C, pv[0], pv[1], pv[2],
                                                       spec.value, 12);
                        break;
                    case SourceSpec::Kind::Tabulated: {
                        const double fa = spec.table[el.v[0]], fb = spec.table[el.v[1]],
                                     fc = spec.table[el.v[2]];
                        contrib = detail::tri_quad(A, B, C, el.measure, [&](const Vec2& P) {
                            auto tri_a = [](const Vec2& X, const Vec2& Y, const Vec2& Z) {
                                return 0.5 * ((Y[0] - X[0]) * (Z[1] - X[1]) -
                                              (Y[1] - X[1]) * (Z[0] - X[0]));
                            };
                            const double full = tri_a(A, B, C);
                            const double la = tri_a(P, B, C) / full;
                            const double lb = tri_a(A, P, C) / full;
                            const double lc = 1.0 - la - lb;
                            const double fval = la * fa + lb * fb + lc * fc;
                            const double phival = la * pv[0] + lb * pv[1] + lc * pv[2];
                            return fval * phival;
                        });
                        break;
                    }
                }
                load[el.v[c]] += contrib;
            }
        }
    }
    return load;
}

/// Boundary load: b_j = g_j * w_j at boundary nodes (lumped surface weights).
inline std::vector<double> boundary_load(const Mesh& m, const ProblemData& d) {
    std::vector<double> load(m.nodes.size(), 0.0);
    const auto g = g_values(m, d);
    for (int b = 0; b < m.boundary_node_count(); ++b)
        load[m.boundary_nodes[b]] = g[b] * m.boundary_weights[b];
    return load;
}

/// ||u||_lambda = sum_e |grad u| m_e + sum_b lambda w |u|.
inline double norm_lambda(const Mesh& m, const GradientOperator& grad, const Field& u,
                          const std::vector<double>& lambda) {
    bind_check(m, u);
    double s = 0.0;
    for (int e = 0; e < m.element_count(); ++e) {
        const Vec2 g = grad.apply(e, u.values);
        s += std::hypot(g[0], g[1]) * m.elements[e].measure;
    }
    for (int b = 0; b < m.boundary_node_count(); ++b)
        s += lambda[b] * m.boundary_weights[b] * std::abs(u.values[m.boundary_nodes[b]]);
    return s;
}

inline double norm_lambda(const Mesh& m, const Field& u, const ProblemData& d) {
    GradientOperator grad(m);
    return norm_lambda(m, grad, u, lambda_values(m, d));
}

/// Lambda = |Omega| + int_boundary lambda.
inline double measure_lambda(const Mesh& m, const std::vector<double>& lambda) {
    double s = m.volume();
    for (int b = 0; b < m.boundary_node_count(); ++b)
        s += lambda[b] * m.boundary_weights[b];
    return s;
}

inline double measure_lambda(const Mesh& m, const ProblemData& d) {
    return measure_lambda(m, lambda_values(m, d));
}

/// Zero band for sign-sensitive boundary checks: 1e-8 * sup|u|.
inline double default_zero_band(const Field& u) { return 1e-8 * u.sup_norm(); }

}  // namespace plap
