#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "parawolff/measure.hpp"

using namespace parawolff;

TEST_CASE("atom inside and outside a closed ball") {
    const auto mu = RadonMeasure::atomic(2, {Atom{{0.0, 0.0}, 1.0}});
    CHECK(mu.ball_mass({0.0, 0.0}, 0.5) == 1.0);
    CHECK(mu.ball_mass({1.0, 0.0}, 0.5) == 0.0);
    // closed-ball convention: the sphere itself counts
    CHECK(mu.ball_mass({1.0, 0.0}, 1.0) == 1.0);
}

TEST_CASE("negative radius is a domain error") {
    const auto mu = RadonMeasure::atomic(1, {Atom{{0.5, 0.0}, 1.0}});
    CHECK_THROWS_AS(mu.ball_mass({0.5, 0.0}, -0.1), std::domain_error);
}

TEST_CASE("total mass sums atoms and density") {
    CHECK(RadonMeasure(1).total_mass() == 0.0);
    const auto atoms = RadonMeasure::atomic(1, {Atom{{0.2, 0.0}, 0.5}, Atom{{0.8, 0.0}, 1.5}});
    CHECK(atoms.total_mass() == 2.0);
    const auto den = RadonMeasure::constant_density(2, 2.0, 1.0, 8);
    CHECK(den.total_mass() == Catch::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("unit-mass disc: density 1/pi over the unit ball") {
    // density 1/pi on a square covering the unit disc around the center;
    // mu(B_1) integrates to one. Oracle: depth-9 subdivision quadrature.
    const double side = 2.2;
    const auto mu = RadonMeasure::constant_density(2, 1.0 / M_PI, side, 64);
    const Point c{1.1, 1.1};
    const double coarse = mu.ball_mass(c, 1.0);        // default depth 4
    const double oracle = mu.ball_mass(c, 1.0, 9);     // high-depth reference
    CHECK(std::abs(oracle - 1.0) < 2e-4);
    CHECK(std::abs(coarse - 1.0) < 3e-3);
    CHECK(std::abs(coarse - oracle) < 3e-3);
}

TEST_CASE("ball mass is monotone in the radius") {
    auto gen = oracles::rng(20240811ull);
    std::uniform_real_distribution<double> coord(0.0, 1.0), massd(0.0, 2.0), radius(0.0, 1.5);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = trial % 2 ? 2 : 1;
        std::vector<Atom> atoms;
        const int k = 1 + static_cast<int>(gen() % 4);
        for (int i = 0; i < k; ++i) atoms.push_back(Atom{{coord(gen), coord(gen)}, massd(gen)});
        std::optional<DensityGrid> den;
        if (trial % 3 == 0) {
            DensityGrid g;
            g.n = n;
            g.side_length = 1.0;
            g.cells_per_axis = 8;
            g.values.assign(static_cast<std::size_t>(g.num_cells()), 0.0);
            for (auto& v : g.values) v = massd(gen);
            den = std::move(g);
        }
        const RadonMeasure mu(n, atoms, den);
        const Point center{coord(gen), coord(gen)};
        double r1 = radius(gen), r2 = radius(gen);
        if (r1 > r2) std::swap(r1, r2);
        const double m1 = mu.ball_mass(center, r1);
        const double m2 = mu.ball_mass(center, r2);
        REQUIRE(m1 <= m2);
        REQUIRE(m2 <= mu.total_mass() + 1e-12 * mu.total_mass());
    }
}

TEST_CASE("ball mass is additive under measure sums") {
    auto gen = oracles::rng(77ull);
    std::uniform_real_distribution<double> coord(0.0, 1.0), massd(0.0, 2.0), radius(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = trial % 2 ? 2 : 1;
        const RadonMeasure a =
            RadonMeasure::atomic(n, {Atom{{coord(gen), coord(gen)}, massd(gen)}});
        DensityGrid g;
        g.n = n;
        g.side_length = 1.0;
        g.cells_per_axis = 4;
        g.values.assign(static_cast<std::size_t>(g.num_cells()), 0.0);
        for (auto& v : g.values) v = massd(gen);
        const RadonMeasure b(n, {Atom{{coord(gen), coord(gen)}, massd(gen)}}, g);
        const RadonMeasure sum = a.plus(b);
        const Point center{coord(gen), coord(gen)};
        const double r = radius(gen);
        const double lhs = sum.ball_mass(center, r);
        const double rhs = a.ball_mass(center, r) + b.ball_mass(center, r);
        REQUIRE(lhs == Catch::Approx(rhs).margin(1e-13));
    }
}

TEST_CASE("construction rejects negative masses and densities") {
    CHECK_THROWS_AS(RadonMeasure::atomic(1, {Atom{{0.1, 0.0}, -1.0}}), std::invalid_argument);
    DensityGrid g;
    g.n = 1;
    g.side_length = 1.0;
    g.cells_per_axis = 4;
    g.values = {1.0, -0.5, 0.0, 0.0};
    CHECK_THROWS_AS(RadonMeasure(1, {}, g), std::invalid_argument);
}

TEST_CASE("support distances") {
    const RadonMeasure mu =
        RadonMeasure::atomic(2, {Atom{{0.5, 0.5}, 1.0}, Atom{{0.9, 0.5}, 2.0}});
    CHECK(mu.nearest_support_distance({0.5, 0.5}) == 0.0);
    CHECK(mu.second_support_distance({0.5, 0.5}) == Catch::Approx(0.4));
    CHECK(RadonMeasure(2).nearest_support_distance({0.5, 0.5}) ==
          std::numeric_limits<double>::infinity());
}

TEST_CASE("cell mass attribution: containing cell and face ties") {
    Domain dom;
    dom.side_length = 1.0;
    dom.cells_per_axis = 4;  // h = 0.25
    // 0.5 sits exactly on the face between cells 1 and 2: the smaller index wins
    const auto mu = RadonMeasure::atomic(1, {Atom{{0.5, 0.0}, 1.0}, Atom{{0.6, 0.0}, 2.0}});
    const auto masses = cell_measure_masses(mu, dom, 1);
    CHECK(masses[1] == 1.0);
    CHECK(masses[2] == 2.0);
    CHECK(masses[0] == 0.0);

    // density integrates exactly by box overlap
    const auto den = RadonMeasure::constant_density(1, 3.0, 1.0, 8);
    const auto dmasses = cell_measure_masses(den, dom, 1);
    for (int c = 0; c < 4; ++c) CHECK(dmasses[static_cast<std::size_t>(c)] == Catch::Approx(0.75));
}
