#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace plap {

using Vec2 = std::array<double, 2>;

/// Surface measure of the unit sphere in R^N, omega_{N-1} = N * volume(B_1).
inline double unit_sphere_area(int dim) {
    if (dim < 1) throw std::invalid_argument("unit_sphere_area: dim must be >= 1");
    const double n = static_cast<double>(dim);
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

/// Discrete domain. Two kinds share one layout:
///  - Radial1D: cells [r_i, r_{i+1}] on [0, R]; cell/facet measures carry the
///    omega_{N-1} r^{N-1} weight of the N-dimensional ball, so assembly code
///    never sees the radial weight. An interval mesh (weight 1, two boundary
///    facets) uses the same kind with ambient_dim = 1.
///  - Triangular2D: structured triangulation of a disk.
struct Mesh {
    enum class Kind { Radial1D, Triangular2D };

    struct Element {
        std::array<int, 3> v{-1, -1, -1};  // Radial1D uses v[0], v[1]
        double measure{};
    };

    struct Facet {
        std::array<int, 2> v{-1, -1};  // Radial1D: single node in v[0]
        double measure{};
        Vec2 normal{};
        int element{-1};  // adjacent element
    };

    Kind kind{};
    int ambient_dim{};  // N of the ball for Radial1D; 2 for Triangular2D
    std::vector<Vec2> nodes;
    std::vector<Element> elements;
    std::vector<Facet> facets;

    // Boundary nodes with lumped surface weights (facet measures split
    // evenly among facet nodes).
    std::vector<int> boundary_nodes;
    std::vector<double> boundary_weights;
    std::vector<int> node_boundary_index;  // node -> index into boundary_nodes, or -1

    std::string id;

    int node_count() const { return static_cast<int>(nodes.size()); }
    int element_count() const { return static_cast<int>(elements.size()); }
    int facet_count() const { return static_cast<int>(facets.size()); }
    int boundary_node_count() const { return static_cast<int>(boundary_nodes.size()); }

    double volume() const {
        double v = 0.0;
        for (const auto& e : elements) v += e.measure;
        return v;
    }

    double boundary_measure() const {
        double s = 0.0;
        for (const auto& f : facets) s += f.measure;
        return s;
    }

    int element_node_count() const { return kind == Kind::Radial1D ? 2 : 3; }
};

namespace detail {

inline void finalize_boundary(Mesh& m) {
    m.node_boundary_index.assign(m.nodes.size(), -1);
    m.boundary_nodes.clear();
    m.boundary_weights.clear();
    for (const auto& f : m.facets) {
        const int nv = (f.v[1] < 0) ? 1 : 2;
        for (int i = 0; i < nv; ++i) {
            const int n = f.v[i];
            if (m.node_boundary_index[n] < 0) {
                m.node_boundary_index[n] = static_cast<int>(m.boundary_nodes.size());
                m.boundary_nodes.push_back(n);
                m.boundary_weights.push_back(0.0);
            }
            m.boundary_weights[m.node_boundary_index[n]] += f.measure / nv;
        }
    }
}

}  // namespace detail

/// Radial grid for the ball B_R in R^N. Cell measures are exact:
/// omega_{N-1} (r_{i+1}^N - r_i^N) / N. grading > 1 refines toward r = 0.
inline Mesh build_radial(int N, double R, int n_cells, double grading = 1.0) {
    if (N < 2) throw std::invalid_argument("build_radial: N must be >= 2");
    if (R <= 0.0) throw std::invalid_argument("build_radial: R must be > 0");
    if (n_cells < 2) throw std::invalid_argument("build_radial: n_cells must be >= 2");
    if (grading <= 0.0) throw std::invalid_argument("build_radial: grading must be > 0");

    Mesh m;
    m.kind = Mesh::Kind::Radial1D;
    m.ambient_dim = N;
    m.id = "radial:N=" + std::to_string(N) + ":R=" + std::to_string(R) +
           ":n=" + std::to_string(n_cells) + ":g=" + std::to_string(grading);

    const double omega = unit_sphere_area(N);
    m.nodes.resize(n_cells + 1);
    for (int i = 0; i <= n_cells; ++i) {
        const double t = static_cast<double>(i) / n_cells;
        // grading > 1 concentrates nodes near r = 0
        m.nodes[i] = {R * std::pow(t, grading), 0.0};
    }
    m.nodes[0][0] = 0.0;
    m.nodes[n_cells][0] = R;

    m.elements.resize(n_cells);
    for (int i = 0; i < n_cells; ++i) {
        const double a = m.nodes[i][0], b = m.nodes[i + 1][0];
        m.elements[i].v = {i, i + 1, -1};
        m.elements[i].measure = omega * (std::pow(b, N) - std::pow(a, N)) / N;
    }

    Mesh::Facet f;
    f.v = {n_cells, -1};
    f.measure = omega * std::pow(R, N - 1);
    f.normal = {1.0, 0.0};
    f.element = n_cells - 1;
    m.facets.push_back(f);

    detail::finalize_boundary(m);
    return m;
}

/// Plain interval [a, b] with unit weight and boundary facets at both ends.
/// Serves as the 1D surrogate grid for oracle-sized problems.
inline Mesh build_interval(double a, double b, int n_cells) {
    if (!(b > a)) throw std::invalid_argument("build_interval: need b > a");
    if (n_cells < 1) throw std::invalid_argument("build_interval: n_cells must be >= 1");

    Mesh m;
    m.kind = Mesh::Kind::Radial1D;
    m.ambient_dim = 1;
    m.id = "interval:" + std::to_string(a) + ":" + std::to_string(b) +
           ":n=" + std::to_string(n_cells);

    m.nodes.resize(n_cells + 1);
    for (int i = 0; i <= n_cells; ++i)
        m.nodes[i] = {a + (b - a) * i / n_cells, 0.0};

    m.elements.resize(n_cells);
    for (int i = 0; i < n_cells; ++i) {
        m.elements[i].v = {i, i + 1, -1};
        m.elements[i].measure = m.nodes[i + 1][0] - m.nodes[i][0];
    }

    Mesh::Facet lo, hi;
    lo.v = {0, -1};
    lo.measure = 1.0;
    lo.normal = {-1.0, 0.0};
    lo.element = 0;
    hi.v = {n_cells, -1};
    hi.measure = 1.0;
    hi.normal = {1.0, 0.0};
    hi.element = n_cells - 1;
    m.facets = {lo, hi};

    detail::finalize_boundary(m);
    return m;
}

/// Structured disk triangulation by concentric rings: ring k of 2^refinement
/// carries 6k nodes, so triangles stay near-equilateral.
inline Mesh build_disk(double R, int refinement) {
    if (R <= 0.0) throw std::invalid_argument("build_disk: R must be > 0");
    if (refinement < 0) throw std::invalid_argument("build_disk: refinement must be >= 0");

    const int K = 1 << refinement;  // number of rings
    Mesh m;
    m.kind = Mesh::Kind::Triangular2D;
    m.ambient_dim = 2;
    m.id = "disk:R=" + std::to_string(R) + ":ref=" + std::to_string(refinement);

    std::vector<int> ring_start(K + 1);
    m.nodes.push_back({0.0, 0.0});
    ring_start[0] = 0;
    for (int k = 1; k <= K; ++k) {
        ring_start[k] = static_cast<int>(m.nodes.size());
        const int nk = 6 * k;
        const double rk = R * k / K;
        for (int j = 0; j < nk; ++j) {
            const double th = 2.0 * std::numbers::pi * j / nk;
            m.nodes.push_back({rk * std::cos(th), rk * std::sin(th)});
        }
    }

    auto push_tri = [&m](int a, int b, int c) {
        const Vec2 &A = m.nodes[a], &B = m.nodes[b], &C = m.nodes[c];
        const double area2 = (B[0] - A[0]) * (C[1] - A[1]) - (B[1] - A[1]) * (C[0] - A[0]);
        Mesh::Element e;
        if (area2 >= 0.0)
            e.v = {a, b, c};
        else
            e.v = {a, c, b};
        e.measure = 0.5 * std::abs(area2);
        m.elements.push_back(e);
    };

    // center fan
    for (int j = 0; j < 6; ++j)
        push_tri(0, ring_start[1] + j, ring_start[1] + (j + 1) % 6);

    // annular bands: walk ring k-1 (6(k-1) nodes) against ring k (6k nodes),
    // one extra outer node per sector
    for (int k = 2; k <= K; ++k) {
        const int ni = 6 * (k - 1), no = 6 * k;
        const int si = ring_start[k - 1], so = ring_start[k];
        for (int s = 0; s < 6; ++s) {
            const int ii0 = s * (k - 1), oo0 = s * k;
            for (int j = 0; j < k - 1; ++j) {
                const int i0 = si + (ii0 + j) % ni;
                const int i1 = si + (ii0 + j + 1) % ni;
                const int o0 = so + (oo0 + j) % no;
                const int o1 = so + (oo0 + j + 1) % no;
                push_tri(i0, o0, o1);
                push_tri(i0, o1, i1);
            }
            // closing triangle of the sector
            const int ilast = si + (ii0 + k - 1) % ni;
            const int olast0 = so + (oo0 + k - 1) % no;
            const int olast1 = so + (oo0 + k) % no;
            push_tri(ilast, olast0, olast1);
        }
    }

    // boundary facets: consecutive nodes of the outer ring
    const int nb = 6 * K, sb = ring_start[K];
    for (int j = 0; j < nb; ++j) {
        Mesh::Facet f;
        f.v = {sb + j, sb + (j + 1) % nb};
        const Vec2 &A = m.nodes[f.v[0]], &B = m.nodes[f.v[1]];
        const double dx = B[0] - A[0], dy = B[1] - A[1];
        f.measure = std::hypot(dx, dy);
        f.normal = {dy / f.measure, -dx / f.measure};  // outward for ccw ring
        f.element = -1;
        m.facets.push_back(f);
    }
    // attach adjacent elements to boundary facets
    {
        for (auto& f : m.facets) {
            for (int ei = 0; ei < m.element_count() && f.element < 0; ++ei) {
                const auto& e = m.elements[ei];
                int hits = 0;
                for (int c = 0; c < 3; ++c)
                    if (e.v[c] == f.v[0] || e.v[c] == f.v[1]) ++hits;
                if (hits == 2) f.element = ei;
            }
        }
    }

    detail::finalize_boundary(m);
    return m;
}

/// Cached per-element gradient maps: nodal values -> constant element gradient.
/// Exact for affine fields on Triangular2D and linear-in-r fields on Radial1D.
struct GradientOperator {
    const Mesh* mesh{};
    // grad_phi[e][local] is the gradient of the local basis function
    std::vector<std::array<Vec2, 3>> grad_phi;

    explicit GradientOperator(const Mesh& m) : mesh(&m) {
        grad_phi.resize(m.elements.size());
        if (m.kind == Mesh::Kind::Radial1D) {
            for (size_t e = 0; e < m.elements.size(); ++e) {
                const auto& el = m.elements[e];
                const double h = m.nodes[el.v[1]][0] - m.nodes[el.v[0]][0];
                grad_phi[e][0] = {-1.0 / h, 0.0};
                grad_phi[e][1] = {1.0 / h, 0.0};
                grad_phi[e][2] = {0.0, 0.0};
            }
        } else {
            for (size_t e = 0; e < m.elements.size(); ++e) {
                const auto& el = m.elements[e];
                const Vec2 &A = m.nodes[el.v[0]], &B = m.nodes[el.v[1]], &C = m.nodes[el.v[2]];
                const double det = (B[0] - A[0]) * (C[1] - A[1]) - (B[1] - A[1]) * (C[0] - A[0]);
                grad_phi[e][0] = {(B[1] - C[1]) / det, (C[0] - B[0]) / det};
                grad_phi[e][1] = {(C[1] - A[1]) / det, (A[0] - C[0]) / det};
                grad_phi[e][2] = {(A[1] - B[1]) / det, (B[0] - A[0]) / det};
            }
        }
    }

    Vec2 apply(int e, const std::vector<double>& u) const {
        const auto& el = mesh->elements[e];
        Vec2 g{0.0, 0.0};
        const int nv = mesh->element_node_count();
        for (int c = 0; c < nv; ++c) {
            g[0] += u[el.v[c]] * grad_phi[e][c][0];
            g[1] += u[el.v[c]] * grad_phi[e][c][1];
        }
        return g;
    }
};

inline nlohmann::json mesh_to_json(const Mesh& m) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["kind"] = (m.kind == Mesh::Kind::Radial1D) ? "radial1d" : "triangular2d";
    j["ambient_dim"] = m.ambient_dim;
    j["id"] = m.id;
    j["nodes"] = m.nodes;
    nlohmann::json els = nlohmann::json::array();
    for (const auto& e : m.elements) els.push_back({{"v", e.v}, {"measure", e.measure}});
    j["elements"] = els;
    nlohmann::json fcs = nlohmann::json::array();
    for (const auto& f : m.facets)
        fcs.push_back({{"v", f.v}, {"measure", f.measure}, {"normal", f.normal}, {"element", f.element}});
    j["facets"] = fcs;
    return j;
}

inline Mesh mesh_from_json(const nlohmann::json& j) {
    if (j.value("schema_version", -1) != 1)
        throw std::invalid_argument("mesh_from_json: unknown schema_version");
    Mesh m;
    m.kind = (j.at("kind") == "radial1d") ? Mesh::Kind::Radial1D : Mesh::Kind::Triangular2D;
    m.ambient_dim = j.at("ambient_dim").get<int>();
    m.id = j.value("id", "");
    m.nodes = j.at("nodes").get<std::vector<Vec2>>();
    for (const auto& je : j.at("elements")) {
        Mesh::Element e;
        e.v = je.at("v").get<std::array<int, 3>>();
        e.measure = je.at("measure").get<double>();
        m.elements.push_back(e);
    }
    for (const auto& jf : j.at("facets")) {
        Mesh::Facet f;
        f.v = jf.at("v").get<std::array<int, 2>>();
        f.measure = jf.at("measure").get<double>();
        f.normal = jf.at("normal").get<Vec2>();
        f.element = jf.at("element").get<int>();
        m.facets.push_back(f);
    }
    detail::finalize_boundary(m);
    return m;
}

}  // namespace plap
