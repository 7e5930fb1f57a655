#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace plap {

/// Exact power base^expo computed in log space; saturates to +inf instead of
/// overflowing (expo reaches 128 on the default sweep schedule).
inline double stable_pow(double base, double expo) {
    if (base < 0.0) throw std::invalid_argument("stable_pow: base must be >= 0");
    if (base == 0.0) return expo == 0.0 ? 1.0 : 0.0;
    const double le = expo * std::log(base);
    if (le > 700.0) return std::numeric_limits<double>::infinity();
    return std::exp(le);
}

/// Ball B_R with f = A/|x|, g = gamma, lambda constant.
struct RadialCase {
    int N{2};
    double R{1.0};
    double A{1.0};
    double gamma{0.0};
    double lambda{1.0};

    RadialCase() = default;
    RadialCase(int N_, double R_, double A_, double gamma_, double lambda_)
        : N(N_), R(R_), A(A_), gamma(gamma_), lambda(lambda_) {
        if (N < 2 || R <= 0.0 || lambda <= 0.0 || A < 0.0 || gamma < 0.0)
            throw std::invalid_argument("RadialCase: need N>=2, R>0, lambda>0, A,gamma>=0");
    }

    double a() const { return A / (N - 1); }
    double b() const { return (a() + gamma) / lambda; }
};

/// u_p(r) = b^{1/(p-1)} + a^{1/(p-1)} (R - r).
inline double radial_solution(const RadialCase& c, double p, double r) {
    if (!(p > 1.0)) throw std::invalid_argument("radial_solution: p must be > 1");
    if (r < 0.0 || r > c.R) throw std::invalid_argument("radial_solution: r outside [0, R]");
    const double s = 1.0 / (p - 1.0);
    return stable_pow(c.b(), s) + stable_pow(c.a(), s) * (c.R - r);
}

/// p -> 1 limit, as the full case taxonomy: the limit is +inf, the affine
/// profile c0 + c1 (R - r), or zero.
struct RadialLimit {
    enum class Tag { Infinite, Finite, Zero };
    Tag tag{};
    std::string branch;   // taxonomy label: "1", "2a", ..., "3c"
    double c0{}, c1{};    // limit profile c0 + c1 (R - r) when finite

    double eval(const RadialCase& c, double r) const {
        switch (tag) {
            case Tag::Infinite: return std::numeric_limits<double>::infinity();
            case Tag::Zero: return 0.0;
            default: return c0 + c1 * (c.R - r);
        }
    }
};

inline RadialLimit radial_limit(const RadialCase& c) {
    const double a = c.a(), b = c.b();
    using Tag = RadialLimit::Tag;
    if (a > 1.0) return {Tag::Infinite, "1"};
    if (a == 1.0) {
        if (c.lambda < 1.0 + c.gamma) return {Tag::Infinite, "2a"};
        if (c.lambda == 1.0 + c.gamma) return {Tag::Finite, "2b", 1.0, 1.0};
        return {Tag::Finite, "2c", 0.0, 1.0};
    }
    if (b > 1.0) return {Tag::Infinite, "3a"};
    if (b == 1.0) return {Tag::Finite, "3b", 1.0, 0.0};
    return {Tag::Zero, "3c"};
}

}  // namespace plap
