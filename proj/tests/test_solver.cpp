#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "plap/radial.hpp"
#include "plap/solver.hpp"

using namespace plap;

namespace {

ProblemData radial_data(double A, double gamma, double lambda) {
    ProblemData d;
    d.f = SourceSpec::radial_singular(A);
    d.g = BoundarySpec::constant(gamma);
    d.lambda = BoundarySpec::constant(lambda);
    return d;
}

}  // namespace

TEST_CASE("energy gradient matches central finite differences") {
    const Mesh m = build_radial(2, 1.0, 12, 1.0);
    const ProblemData d = radial_data(1.0, 0.5, 2.0);
    SolveParams sp;
    sp.p = 1.5;
    sp.epsilon = 1e-3;

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    Field u(m);
    for (double& v : u.values) v = val(rng);

    const Field g = energy_gradient(m, d, u, sp);
    double gscale = 0.0;
    for (double v : g.values) gscale = std::max(gscale, std::abs(v));
    for (int j = 0; j < m.node_count(); ++j) {
        const double fd = oracle::central_diff(
            [&](double x) {
                Field w = u;
                w.values[j] = x;
                return energy(m, d, w, sp).total();
            },
            u.values[j], 1e-6);
        CHECK(std::abs(g.values[j] - fd) <= 1e-5 * (gscale + 1.0));
    }
}

TEST_CASE("p = 2 radial case reproduces the closed form") {
    const Mesh m = build_radial(2, 1.0, 200, 1.0);
    const ProblemData d = radial_data(1.0, 0.5, 2.0);
    SolveParams sp;
    sp.p = 2.0;
    sp.epsilon = 1e-10;
    const SolveResult res = solve_p(m, d, sp);
    REQUIRE(res.converged);
    const RadialCase c{2, 1.0, 1.0, 0.5, 2.0};
    // u(R) = b = 0.75, u(0) = 1.75
    CHECK(res.u.values.back() == doctest::Approx(0.75).epsilon(1e-6));
    CHECK(res.u.values.front() == doctest::Approx(1.75).epsilon(1e-6));
    for (int j = 0; j < m.node_count(); ++j)
        CHECK(res.u.values[j] ==
              doctest::Approx(radial_solution(c, 2.0, m.nodes[j][0])).epsilon(1e-6));
}

TEST_CASE("p = 1.25 radial case matches the closed form within 1e-3") {
    const Mesh m = build_radial(2, 1.0, 200, 1.0);
    const ProblemData d = radial_data(1.0, 0.5, 2.0);
    SolveParams sp;
    sp.p = 1.25;
    sp.epsilon = 1e-9;
    const SolveResult res = solve_p(m, d, sp);
    REQUIRE(res.converged);
    const RadialCase c{2, 1.0, 1.0, 0.5, 2.0};
    for (int j = 0; j < m.node_count(); ++j) {
        const double exact = radial_solution(c, 1.25, m.nodes[j][0]);
        CHECK(std::abs(res.u.values[j] - exact) <= 1e-3 * std::max(1.0, exact));
    }
}

TEST_CASE("zero data yields the zero solution") {
    const Mesh m = build_radial(2, 1.0, 50, 1.0);
    const ProblemData d = radial_data(0.0, 0.0, 1.0);
    SolveParams sp;
    sp.p = 1.5;
    const SolveResult res = solve_p(m, d, sp);
    REQUIRE(res.converged);
    CHECK(res.u.sup_norm() <= 1e-7);
}

TEST_CASE("homogeneity: scaling the data by t scales the solution by t^{1/(p-1)}") {
    const Mesh m = build_radial(2, 1.0, 80, 1.0);
    const double p = 1.5;
    SolveParams sp;
    sp.p = p;
    sp.epsilon = 1e-10;
    const SolveResult base = solve_p(m, radial_data(1.0, 0.5, 2.0), sp);
    REQUIRE(base.converged);
    for (double t : {0.5, 2.0}) {
        const SolveResult scaled = solve_p(m, radial_data(t * 1.0, t * 0.5, 2.0), sp);
        REQUIRE(scaled.converged);
        const double factor = std::pow(t, 1.0 / (p - 1.0));
        for (int j = 0; j < m.node_count(); j += 7)
            CHECK(scaled.u.values[j] ==
                  doctest::Approx(factor * base.u.values[j]).epsilon(1e-5));
    }
}

TEST_CASE("energy decreases across Newton iterations") {
    // monotone damped Newton: the final energy is below the zero-field energy
    const Mesh m = build_radial(2, 1.0, 60, 1.0);
    const ProblemData d = radial_data(1.0, 0.5, 2.0);
    SolveParams sp;
    sp.p = 1.3;
    const SolveResult res = solve_p(m, d, sp);
    REQUIRE(res.converged);
    const double e0 = energy(m, d, Field(m), sp).total();
    CHECK(res.energy.total() < e0);
    // and a random perturbation of the solution cannot lower the energy
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    for (int t = 0; t < 10; ++t) {
        Field w = res.u;
        for (double& v : w.values) v += 1e-3 * val(rng);
        CHECK(energy(m, d, w, sp).total() >= res.energy.total() - 1e-12);
    }
}

TEST_CASE("solver rejects invalid parameters") {
    const Mesh m = build_radial(2, 1.0, 10, 1.0);
    const ProblemData d = radial_data(1.0, 0.0, 1.0);
    SolveParams sp;
    sp.p = 2.5;
    CHECK_THROWS_AS(solve_p(m, d, sp), std::invalid_argument);
    sp.p = 1.0;
    CHECK_THROWS_AS(solve_p(m, d, sp), std::invalid_argument);
    sp.p = 1.5;
    sp.epsilon = 0.0;
    CHECK_THROWS_AS(solve_p(m, d, sp), std::invalid_argument);
    sp.epsilon = 1e-8;
    CHECK_THROWS_AS(solve_p(m, radial_data(1.0, 0.0, 0.0), sp),
                    std::invalid_argument);  // lambda identically zero
}

TEST_CASE("overflow guard reports blow-up instead of diverging") {
    const Mesh m = build_radial(2, 1.0, 40, 1.0);
    const ProblemData d = radial_data(2.0, 0.0, 1.0);  // a = 2 -> huge at small p
    SolveParams sp;
    sp.p = 1.01;
    sp.epsilon = 1e-6;
    sp.overflow_guard = 1e3;
    Field big(m, 1e2);
    const SolveResult res = solve_p(m, d, sp, big);
    if (!res.converged) CHECK(res.status == SolveStatus::Overflow);
}

TEST_CASE("disk solve agrees with the radial solve on shared data") {
    // f = 1, g = 0, lambda = 1, p = 1.5: compare boundary values
    ProblemData d;
    d.f = SourceSpec::constant(1.0);
    d.lambda = BoundarySpec::constant(1.0);
    SolveParams sp;
    sp.p = 1.5;
    sp.epsilon = 1e-9;

    const Mesh radial = build_radial(2, 1.0, 200, 1.0);
    const SolveResult r1 = solve_p(radial, d, sp);
    REQUIRE(r1.converged);

    const Mesh disk = build_disk(1.0, 5);
    const SolveResult r2 = solve_p(disk, d, sp);
    REQUIRE(r2.converged);

    double disk_boundary_mean = 0.0;
    for (int b = 0; b < disk.boundary_node_count(); ++b)
        disk_boundary_mean += r2.u.values[disk.boundary_nodes[b]];
    disk_boundary_mean /= disk.boundary_node_count();
    CHECK(disk_boundary_mean ==
          doctest::Approx(r1.u.values.back()).epsilon(0.02));
}
