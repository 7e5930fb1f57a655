#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "plap/core.hpp"
#include "plap/mesh.hpp"

namespace plap {

/// A (volume, boundary) function pair with the measures and lambda weights of
/// a bound mesh: volume values live on elements, boundary values on boundary
/// nodes weighted by lambda w.
struct MixedFunctionPair {
    std::vector<double> volume_values;
    std::vector<double> boundary_values;
    std::vector<double> volume_weights;    // element measures
    std::vector<double> boundary_weights;  // lambda_b * w_b

    MixedFunctionPair() = default;
    MixedFunctionPair(const Mesh& m, const ProblemData& d,
                      std::vector<double> vol, std::vector<double> bnd)
        : volume_values(std::move(vol)), boundary_values(std::move(bnd)) {
        if (volume_values.size() != static_cast<size_t>(m.element_count()) ||
            boundary_values.size() != static_cast<size_t>(m.boundary_node_count()))
            throw std::invalid_argument("MixedFunctionPair: size mismatch with mesh");
        volume_weights.reserve(m.elements.size());
        for (const auto& e : m.elements) volume_weights.push_back(e.measure);
        const auto lam = lambda_values(m, d);
        boundary_weights.resize(lam.size());
        for (size_t b = 0; b < lam.size(); ++b)
            boundary_weights[b] = lam[b] * m.boundary_weights[b];
    }

    double total_weight() const {
        double s = 0.0;
        for (double w : volume_weights) s += w;
        for (double w : boundary_weights) s += w;
        return s;
    }
};

/// [sum w |f|^s + sum lam w |g|^s]^{1/s}, computed in log-sum-exp form so
/// s = 1024 on values above 1 stays finite.
inline double mixed_norm(const MixedFunctionPair& pair, double s) {
    if (!(s >= 1.0)) throw std::invalid_argument("mixed_norm: s must be >= 1");
    double top = 0.0;  // max log|value| over weighted support
    bool any = false;
    auto scan = [&](const std::vector<double>& vals, const std::vector<double>& wts) {
        for (size_t i = 0; i < vals.size(); ++i) {
            if (wts[i] <= 0.0 || vals[i] == 0.0) continue;
            const double lv = std::log(std::abs(vals[i]));
            top = any ? std::max(top, lv) : lv;
            any = true;
        }
    };
    scan(pair.volume_values, pair.volume_weights);
    scan(pair.boundary_values, pair.boundary_weights);
    if (!any) return 0.0;

    double acc = 0.0;
    auto accumulate = [&](const std::vector<double>& vals, const std::vector<double>& wts) {
        for (size_t i = 0; i < vals.size(); ++i) {
            if (wts[i] <= 0.0 || vals[i] == 0.0) continue;
            acc += wts[i] * std::exp(s * (std::log(std::abs(vals[i])) - top));
        }
    };
    accumulate(pair.volume_values, pair.volume_weights);
    accumulate(pair.boundary_values, pair.boundary_weights);
    return std::exp(top + std::log(acc) / s);
}

struct HolderSides {
    double lhs{};
    double rhs{};
};

/// Mixed Hoelder: int|f1 f2| + int lam|g1 g2| <= ||pair1||_p ||pair2||_p'.
inline HolderSides mixed_holder_check(const MixedFunctionPair& p1,
                                      const MixedFunctionPair& p2, double p) {
    if (!(p > 1.0)) throw std::invalid_argument("mixed_holder_check: need p > 1");
    if (p1.volume_values.size() != p2.volume_values.size() ||
        p1.boundary_values.size() != p2.boundary_values.size())
        throw std::invalid_argument("mixed_holder_check: pair shapes differ");
    const double pc = p / (p - 1.0);
    HolderSides out;
    for (size_t i = 0; i < p1.volume_values.size(); ++i)
        out.lhs += p1.volume_weights[i] * std::abs(p1.volume_values[i] * p2.volume_values[i]);
    for (size_t b = 0; b < p1.boundary_values.size(); ++b)
        out.lhs += p1.boundary_weights[b] *
                   std::abs(p1.boundary_values[b] * p2.boundary_values[b]);
    out.rhs = mixed_norm(p1, p) * mixed_norm(p2, pc);
    return out;
}

/// Mixed norm at the largest s in the list; approaches
/// max{sup|f|, sup_{lambda>0}|g|} as s grows.
inline double mixed_norm_limit(const MixedFunctionPair& pair,
                               const std::vector<double>& s_list) {
    if (s_list.empty()) throw std::invalid_argument("mixed_norm_limit: empty s list");
    for (size_t i = 1; i < s_list.size(); ++i)
        if (!(s_list[i] > s_list[i - 1]))
            throw std::invalid_argument("mixed_norm_limit: s list must be increasing");
    return mixed_norm(pair, s_list.back());
}

/// sup of |values| restricted to positive weights.
inline double weighted_sup(const MixedFunctionPair& pair) {
    double s = 0.0;
    for (size_t i = 0; i < pair.volume_values.size(); ++i)
        if (pair.volume_weights[i] > 0.0) s = std::max(s, std::abs(pair.volume_values[i]));
    for (size_t b = 0; b < pair.boundary_values.size(); ++b)
        if (pair.boundary_weights[b] > 0.0) s = std::max(s, std::abs(pair.boundary_values[b]));
    return s;
}

}  // namespace plap
