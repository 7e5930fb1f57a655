#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "plap/radial.hpp"
#include "plap/threshold.hpp"

using namespace plap;

TEST_CASE("closed-form values") {
    const RadialCase c{2, 1.0, 1.0, 0.5, 2.0};
    CHECK(c.a() == doctest::Approx(1.0));
    CHECK(c.b() == doctest::Approx(0.75));
    CHECK(radial_solution(c, 2.0, 0.0) == doctest::Approx(1.75).epsilon(1e-14));
    CHECK(radial_solution(c, 1.5, 1.0) == doctest::Approx(0.5625).epsilon(1e-14));
}

TEST_CASE("zero data gives the zero solution") {
    const RadialCase c{2, 1.0, 0.0, 0.0, 1.0};
    for (double p : {2.0, 1.5, 1.1})
        for (double r : {0.0, 0.5, 1.0})
            CHECK(radial_solution(c, p, r) == 0.0);
}

TEST_CASE("argument validation") {
    CHECK_THROWS_AS((RadialCase{1, 1.0, 1.0, 0.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS((RadialCase{2, 0.0, 1.0, 0.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS((RadialCase{2, 1.0, -1.0, 0.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS((RadialCase{2, 1.0, 1.0, 0.0, 0.0}), std::invalid_argument);
    const RadialCase c{2, 1.0, 1.0, 0.0, 1.0};
    CHECK_THROWS_AS(radial_solution(c, 2.0, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(radial_solution(c, 2.0, 1.1), std::invalid_argument);
    CHECK_THROWS_AS(radial_solution(c, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("stable powers survive the smallest schedule exponent") {
    // s = 1/(p-1) = 128: 2^128 and 0.5^128 both representable
    CHECK(stable_pow(2.0, 128.0) == doctest::Approx(std::ldexp(1.0, 128)).epsilon(1e-12));
    CHECK(stable_pow(0.5, 128.0) == doctest::Approx(std::ldexp(1.0, -128)).epsilon(1e-12));
    CHECK(std::isinf(stable_pow(10.0, 1000.0)));
    CHECK(stable_pow(0.0, 5.0) == 0.0);
}

TEST_CASE("seven-branch taxonomy") {
    struct Case {
        RadialCase c;
        RadialLimit::Tag tag;
        const char* branch;
    };
    const Case cases[] = {
        {{2, 1.0, 2.0, 0.0, 1.0}, RadialLimit::Tag::Infinite, "1"},    // a=2>1
        {{2, 1.0, 1.0, 0.5, 1.0}, RadialLimit::Tag::Infinite, "2a"},   // a=1, l<1+g
        {{2, 1.0, 1.0, 0.5, 1.5}, RadialLimit::Tag::Finite, "2b"},     // l=1+g
        {{2, 1.0, 1.0, 0.5, 2.0}, RadialLimit::Tag::Finite, "2c"},     // l>1+g
        {{2, 1.0, 0.5, 0.25, 0.5}, RadialLimit::Tag::Infinite, "3a"},  // b=1.5>1
        {{2, 1.0, 0.5, 0.5, 1.0}, RadialLimit::Tag::Finite, "3b"},     // b=1
        {{2, 1.0, 0.5, 0.0, 2.0}, RadialLimit::Tag::Zero, "3c"},       // b=0.25
        {{3, 1.0, 4.0, 0.0, 1.0}, RadialLimit::Tag::Infinite, "1"},    // a=2>1
    };
    for (const auto& k : cases) {
        const RadialLimit lim = radial_limit(k.c);
        CHECK(lim.tag == k.tag);
        CHECK(lim.branch == k.branch);
    }
    // finite profiles
    const RadialLimit l2b = radial_limit({2, 1.0, 1.0, 0.5, 1.5});
    CHECK(l2b.eval({2, 1.0, 1.0, 0.5, 1.5}, 0.0) == doctest::Approx(2.0));  // 1+(R-r)
    const RadialLimit l2c = radial_limit({2, 1.0, 1.0, 0.5, 2.0});
    CHECK(l2c.eval({2, 1.0, 1.0, 0.5, 2.0}, 0.25) == doctest::Approx(0.75));  // R-r
    const RadialLimit l3b = radial_limit({2, 1.0, 0.5, 0.5, 1.0});
    CHECK(l3b.eval({2, 1.0, 0.5, 0.5, 1.0}, 0.9) == doctest::Approx(1.0));  // const 1
}

TEST_CASE("pointwise convergence to the limit at p = 1.001") {
    const double p = 1.001;
    for (const RadialCase c : {RadialCase{2, 1.0, 1.0, 0.5, 1.5},
                               RadialCase{2, 1.0, 1.0, 0.5, 2.0},
                               RadialCase{2, 1.0, 0.5, 0.5, 1.0},
                               RadialCase{2, 1.0, 0.5, 0.0, 2.0}}) {
        const RadialLimit lim = radial_limit(c);
        for (double r : {0.0, 0.3, 0.7, 1.0}) {
            const double up = radial_solution(c, p, r);
            const double ul = lim.eval(c, r);
            if (lim.tag == RadialLimit::Tag::Zero)
                CHECK(up <= 0.01);
            else
                CHECK(up == doctest::Approx(ul).epsilon(0.01));
        }
    }
}

TEST_CASE("limit verdict agrees with the threshold value") {
    // Infinite <=> M > 1 or the 2a sub-branch; Zero <=> M < 1; grid sweep
    for (int N : {2, 3})
        for (double A : {0.0, 0.4, 1.0, 1.6, 2.5})
            for (double gamma : {0.0, 0.3, 1.0})
                for (double lambda : {0.5, 1.0, 1.7}) {
                    const RadialCase c{N, 1.0, A, gamma, lambda};
                    const double M = radial_M(N, 1.0, A, gamma, lambda);
                    const RadialLimit lim = radial_limit(c);
                    if (M > 1.0 + 1e-12) CHECK(lim.tag == RadialLimit::Tag::Infinite);
                    if (M < 1.0 - 1e-12) CHECK(lim.tag == RadialLimit::Tag::Zero);
                    if (lim.tag == RadialLimit::Tag::Finite)
                        CHECK(M == doctest::Approx(1.0).epsilon(1e-12));
                }
}

TEST_CASE("radial_M matches max{a, b}") {
    CHECK(radial_M(2, 1.0, 1.0, 0.5, 2.0) == doctest::Approx(1.0));
    CHECK(radial_M(2, 1.0, 1.0, 0.5, 1.0) == doctest::Approx(1.5));
    CHECK(radial_M(2, 1.0, 0.5, 0.0, 2.0) == doctest::Approx(0.5));
    CHECK(radial_M(3, 1.0, 4.0, 0.0, 1.0) == doctest::Approx(2.0));
    CHECK_THROWS_AS(radial_M(2, 1.0, 1.0, 0.0, 0.0), std::invalid_argument);
}
