// Independent oracles used by the tests: a dense linear solver, an
// exhaustive LP vertex enumerator for the dual-norm problem on small 1D
// grids, and central finite differences. Deliberately brute force and
// structurally unrelated to the library implementations they check.
#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "plap/core.hpp"
#include "plap/mesh.hpp"

namespace oracle {

// Gaussian elimination with partial pivoting; returns false if singular.
inline bool dense_solve(std::vector<std::vector<double>> A, std::vector<double> b,
                        std::vector<double>& x) {
    const int n = static_cast<int>(b.size());
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        if (std::abs(A[piv][col]) < 1e-12) return false;
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        for (int r = col + 1; r < n; ++r) {
            const double f = A[r][col] / A[col][col];
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c) A[r][c] -= f * A[col][c];
            b[r] -= f * b[col];
        }
    }
    x.assign(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= A[r][c] * x[c];
        x[r] = s / A[r][r];
    }
    return true;
}

// Exact M = sup c.u / ||u||_lambda on a 1D chain by enumerating the vertices
// of the lifted polytope {v_e >= |u_{j+1}-u_j|, s_b >= |u_b|,
// sum W_e v_e + sum lamw_b s_b = 1} and maximizing c.u over them.
// W_e = m_e / h_e so that W_e |du| is the weighted gradient integral.
struct ChainNormLP {
    std::vector<double> c;     // objective per node
    std::vector<double> W;     // edge weights m_e / h_e
    std::vector<double> lamw;  // per boundary node (first, last): lambda * w
};

inline double lp_vertex_max(const ChainNormLP& lp) {
    const int n = static_cast<int>(lp.c.size());
    const int ne = n - 1;
    const int nb = 2;  // chain endpoints
    const int dim = n + ne + nb;  // u, v, s
    // inequality rows: a.x >= 0
    struct Row {
        std::vector<double> a;
    };
    std::vector<Row> ineq;
    auto row = [&]() { return std::vector<double>(dim, 0.0); };
    for (int e = 0; e < ne; ++e)
        for (int sign : {+1, -1}) {
            auto a = row();
            a[n + e] = 1.0;
            a[e + 1] -= sign;
            a[e] += sign;
            ineq.push_back({a});
        }
    const int bnode[2] = {0, n - 1};
    for (int b = 0; b < nb; ++b)
        for (int sign : {+1, -1}) {
            auto a = row();
            a[n + ne + b] = 1.0;
            a[bnode[b]] -= sign;
            ineq.push_back({a});
        }
    std::vector<double> norm_row(dim, 0.0);
    for (int e = 0; e < ne; ++e) norm_row[n + e] = lp.W[e];
    for (int b = 0; b < nb; ++b) norm_row[n + ne + b] = lp.lamw[b];

    const int m = static_cast<int>(ineq.size());
    const int need = dim - 1;  // active inequalities at a vertex
    std::vector<int> pick(need);
    double best = 0.0;

    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == need) {
            std::vector<std::vector<double>> A;
            A.reserve(dim);
            for (int i = 0; i < need; ++i) A.push_back(ineq[pick[i]].a);
            A.push_back(norm_row);
            std::vector<double> b(dim, 0.0);
            b[dim - 1] = 1.0;
            std::vector<double> x;
            if (!dense_solve(A, b, x)) return;
            for (const auto& r : ineq) {
                double s = 0.0;
                for (int i = 0; i < dim; ++i) s += r.a[i] * x[i];
                if (s < -1e-9) return;  // infeasible vertex
            }
            double obj = 0.0;
            for (int j = 0; j < n; ++j) obj += lp.c[j] * x[j];
            if (obj > best) best = obj;
            return;
        }
        for (int i = start; i <= m - (need - depth); ++i) {
            pick[depth] = i;
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);
    return best;
}

// Builds the LP data from a mesh and problem data (chain meshes only).
inline ChainNormLP chain_lp_from(const plap::Mesh& m, const plap::ProblemData& d) {
    const int n = m.node_count();
    ChainNormLP lp;
    const auto fl = plap::source_load(m, d);
    const auto gl = plap::boundary_load(m, d);
    lp.c.resize(n);
    for (int j = 0; j < n; ++j) lp.c[j] = fl[j] + gl[j];
    lp.W.assign(n - 1, 0.0);
    for (const auto& el : m.elements) {
        const double h = m.nodes[el.v[1]][0] - m.nodes[el.v[0]][0];
        lp.W[el.v[0]] = el.measure / h;
    }
    const auto lam = plap::lambda_values(m, d);
    lp.lamw.resize(2);
    for (int b = 0; b < 2; ++b) {
        // chain boundary order: find boundary index of node 0 and node n-1
        const int node = (b == 0) ? 0 : n - 1;
        const int bi = m.node_boundary_index[node];
        lp.lamw[b] = (bi >= 0) ? lam[bi] * m.boundary_weights[bi] : 0.0;
    }
    return lp;
}

// Central finite difference of a scalar functional.
inline double central_diff(const std::function<double(double)>& f, double x0,
                           double h = 1e-6) {
    return (f(x0 + h) - f(x0 - h)) / (2.0 * h);
}

}  // namespace oracle
