#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "parawolff/wolff.hpp"

using namespace parawolff;

TEST_CASE("closed-form atom values") {
    // n=2, p=3: integrand r^(-1/2), so W(0, 1) = 2
    const auto w = wolff_closed_form_atom(1.0, 0.0, 1.0, 3.0, 2.0);
    REQUIRE_FALSE(w.divergent);
    CHECK(w.value == Catch::Approx(2.0).epsilon(1e-14));

    // mass scaling m^(1/(p-1)): m = 16 gives 4 * 2 = 8
    const auto w16 = wolff_closed_form_atom(16.0, 0.0, 1.0, 3.0, 2.0);
    CHECK(w16.value == Catch::Approx(8.0).epsilon(1e-14));

    // support outside the truncation radius
    CHECK(wolff_closed_form_atom(1.0, 2.0, 1.0, 3.0, 2.0).value == 0.0);

    // p = n at positive distance: logarithmic antiderivative
    const auto wl = wolff_closed_form_atom(4.0, 0.25, 1.0, 2.0, 2.0);
    CHECK(wl.value == Catch::Approx(4.0 * std::log(4.0)).epsilon(1e-14));

    // p <= n with the atom at the center diverges
    CHECK(wolff_closed_form_atom(1.0, 0.0, 1.0, 2.0, 2.0).divergent);

    CHECK_THROWS_AS(wolff_closed_form_atom(1.0, 0.0, -1.0, 3.0, 2.0), std::domain_error);
    CHECK_THROWS_AS(wolff_closed_form_atom(-1.0, 0.0, 1.0, 3.0, 2.0), std::domain_error);
}

TEST_CASE("quadrature path reproduces the closed form for a centered atom") {
    const auto mu = RadonMeasure::atomic(2, {Atom{{0.0, 0.0}, 1.0}});
    const auto w = wolff_potential(mu, WolffQuery{{0.0, 0.0}, 1.0, 3.0, 2});
    REQUIRE_FALSE(w.divergent);
    CHECK(w.value == Catch::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("zero measure has zero potential") {
    const auto w = wolff_potential(RadonMeasure(2), WolffQuery{{0.3, 0.3}, 1.0, 3.0, 2});
    CHECK(w.value == 0.0);
    CHECK_FALSE(w.divergent);
}

TEST_CASE("centered atom with p <= n is divergent") {
    const auto mu = RadonMeasure::atomic(2, {Atom{{0.4, 0.4}, 1.0}});
    CHECK(wolff_potential(mu, WolffQuery{{0.4, 0.4}, 1.0, 2.0, 2}).divergent);
    // but off-center queries stay finite
    CHECK_FALSE(wolff_potential(mu, WolffQuery{{0.6, 0.4}, 1.0, 2.0, 2}).divergent);
}

TEST_CASE("nonpositive truncation radius is a domain error") {
    const auto mu = RadonMeasure::atomic(2, {Atom{{0.0, 0.0}, 1.0}});
    CHECK_THROWS_AS(wolff_potential(mu, WolffQuery{{0.0, 0.0}, 0.0, 3.0, 2}), std::domain_error);
}

TEST_CASE("constant density: potential of mu(B_r) ~ r^n") {
    // density 1/pi in the plane, so mu(B_r) = r^2; the integrand is
    // sqrt(r), giving W(0, 1) = 2/3. Evaluated on a discrete density, whose
    // cell-overlap error dominates the quadrature tolerance.
    const auto mu = RadonMeasure::constant_density(2, 1.0 / M_PI, 2.2, 32);
    WolffOptions opt;
    opt.rel_tol = 1e-7;
    const auto w = wolff_potential(mu, WolffQuery{{1.1, 1.1}, 1.0, 3.0, 2}, opt);
    REQUIRE_FALSE(w.divergent);
    CHECK(w.value == Catch::Approx(2.0 / 3.0).margin(5e-3));
}

TEST_CASE("exact power-law ball mass matches the antiderivative") {
    // For mu(B_r) = c r^n the potential is ((p-1)/p) c^(1/(p-1)) R^(p/(p-1)).
    for (const double p : {2.0, 2.5, 3.0, 4.0}) {
        for (const double c : {0.3, 1.0, 7.5}) {
            const int n = 2;
            const double R = 0.8;
            WolffQuery q{{0.0, 0.0}, R, p, n};
            auto ball = [&](double r) { return c * std::pow(r, n); };
            const auto w = wolff_potential_quadrature(ball, 0.0, 0.0, q);
            const double expected =
                (p - 1.0) / p * std::pow(c, 1.0 / (p - 1.0)) * std::pow(R, p / (p - 1.0));
            REQUIRE_FALSE(w.divergent);
            REQUIRE(w.value == Catch::Approx(expected).epsilon(1e-9));
        }
    }
}

TEST_CASE("quadrature agrees with the piecewise closed form on atomic measures") {
    auto gen = oracles::rng(424242ull);
    std::uniform_real_distribution<double> coord(-0.5, 0.5), massd(0.1, 3.0);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = trial % 2 ? 2 : 1;
        const double p = 2.2 + 0.3 * (trial % 5);
        std::vector<Atom> atoms;
        const int k = 1 + static_cast<int>(gen() % 5);
        for (int i = 0; i < k; ++i) atoms.push_back(Atom{{coord(gen), coord(gen)}, massd(gen)});
        if (trial % 4 == 0) atoms.push_back(Atom{{0.0, 0.0}, massd(gen)});  // atom at the center
        const auto mu = RadonMeasure::atomic(n, atoms);
        const WolffQuery q{{0.0, 0.0}, 0.9, p, n};
        const auto got = wolff_potential(mu, q);
        const auto want = oracles::wolff_atomic_piecewise(mu, q.center, q.R, p, n);
        REQUIRE(got.divergent == want.divergent);
        if (!want.divergent) {
            REQUIRE(got.value ==
                    Catch::Approx(want.value).epsilon(1e-8).margin(1e-12));
        }
    }
}

TEST_CASE("homogeneity: scaling the measure scales W by c^(1/(p-1))") {
    auto gen = oracles::rng(99ull);
    std::uniform_real_distribution<double> coord(-0.4, 0.4), massd(0.2, 2.0), scale(0.1, 10.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = trial % 2 ? 2 : 1;
        const double p = 2.5 + (trial % 3);
        std::vector<Atom> atoms{Atom{{coord(gen), coord(gen)}, massd(gen)},
                                Atom{{coord(gen), coord(gen)}, massd(gen)}};
        const auto mu = RadonMeasure::atomic(n, atoms);
        const double c = scale(gen);
        const WolffQuery q{{0.0, 0.0}, 1.0, p, n};
        const auto base = wolff_potential(mu, q);
        const auto scaled = wolff_potential(mu.scaled(c), q);
        REQUIRE_FALSE(base.divergent);
        const double expected = std::pow(c, 1.0 / (p - 1.0)) * base.value;
        REQUIRE(scaled.value == Catch::Approx(expected).epsilon(1e-8).margin(1e-14));
    }
}

TEST_CASE("monotone in the truncation radius") {
    auto gen = oracles::rng(7ull);
    std::uniform_real_distribution<double> coord(-0.4, 0.4), massd(0.2, 2.0), radius(0.05, 1.2);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = trial % 2 ? 2 : 1;
        const auto mu = RadonMeasure::atomic(
            n, {Atom{{coord(gen), coord(gen)}, massd(gen)}, Atom{{coord(gen), coord(gen)}, massd(gen)}});
        double r1 = radius(gen), r2 = radius(gen);
        if (r1 > r2) std::swap(r1, r2);
        const auto w1 = wolff_potential(mu, WolffQuery{{0.0, 0.0}, r1, 3.0, n});
        const auto w2 = wolff_potential(mu, WolffQuery{{0.0, 0.0}, r2, 3.0, n});
        REQUIRE(w1.value <= w2.value * (1.0 + 1e-12) + 1e-15);
    }
}
