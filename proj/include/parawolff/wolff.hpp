// Truncated Wolff potential
//
//   W(x, R) = ∫_0^R ( mu(B_r(x)) / r^(n-p) )^(1/(p-1)) dr/r
//
// evaluated by adaptive radial quadrature, with an atom sitting at the
// query center handled in closed form (that is the only point where the
// integrand can fail to be integrable).
#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "parawolff/measure.hpp"
#include "parawolff/quadrature.hpp"

namespace parawolff {

struct WolffQuery {
    Point center{0.0, 0.0};
    double R = 1.0;   // truncation radius
    double p = 3.0;
    int n = 1;
};

/// A potential value; divergence is a first-class outcome, not an error.
struct PotentialValue {
    double value = 0.0;
    bool divergent = false;

    static PotentialValue finite(double v) { return {v, false}; }
    static PotentialValue diverged() { return {std::numeric_limits<double>::infinity(), true}; }
};

/// Exact potential of a single atom of mass m at distance `dist` from the
/// query center, via the antiderivative of m^(1/(p-1)) r^((p-n)/(p-1)-1).
inline PotentialValue wolff_closed_form_atom(double m, double dist, double R, double p, double n) {
    if (!(R > 0.0)) throw std::domain_error("wolff_closed_form_atom: R must be positive");
    if (!(m >= 0.0)) throw std::domain_error("wolff_closed_form_atom: negative mass");
    if (!(dist >= 0.0)) throw std::domain_error("wolff_closed_form_atom: negative distance");
    if (!(p > 1.0)) throw std::domain_error("wolff_closed_form_atom: p must exceed 1");
    if (m == 0.0 || dist >= R) return PotentialValue::finite(0.0);
    if (dist == 0.0 && p <= n) return PotentialValue::diverged();
    const double amp = std::pow(m, 1.0 / (p - 1.0));
    if (p == n) return PotentialValue::finite(amp * std::log(R / dist));
    const double theta = (p - n) / (p - 1.0);
    const double lower = dist == 0.0 ? 0.0 : std::pow(dist, theta);
    return PotentialValue::finite(amp * ((p - 1.0) / (p - n)) * (std::pow(R, theta) - lower));
}

struct WolffOptions {
    double rel_tol = 1e-10;
    int max_depth = 40;
    int ball_depth = 4;  // subdivision depth for density ball masses
};

/// Generic quadrature path over an arbitrary ball-mass function.
/// `center_atom_mass` is the mass sitting exactly at the query center and
/// `support_gap` the distance to the nearest other support point (+inf
/// when there is none); both let the integrable singularity at r = 0 be
/// split off in closed form.
template <class BallMass>
PotentialValue wolff_potential_quadrature(BallMass&& mu_ball, double center_atom_mass,
                                          double support_gap, const WolffQuery& q,
                                          const WolffOptions& opt = {},
                                          std::vector<double> jump_radii = {}) {
    if (!(q.R > 0.0)) throw std::domain_error("wolff_potential: R must be positive");
    if (!(q.p > 1.0)) throw std::domain_error("wolff_potential: p must exceed 1");
    const double p = q.p;
    const double n = q.n;
    const double e = 1.0 / (p - 1.0);
    const double theta = (p - n) * e;

    QuadratureOptions qopt;
    qopt.rel_tol = opt.rel_tol;
    qopt.max_depth = opt.max_depth;

    auto g = [&](double r) {
        const double mass = mu_ball(r);
        return mass == 0.0 ? 0.0 : std::pow(mass, e) * std::pow(r, theta - 1.0);
    };

    if (center_atom_mass > 0.0) {
        if (p <= n) return PotentialValue::diverged();
        // Closed form for the constant center mass over the full range,
        // plus the quadrature of the remainder, which vanishes below the
        // first other support point.
        const double base =
            std::pow(center_atom_mass, e) * ((p - 1.0) / (p - n)) * std::pow(q.R, theta);
        if (support_gap >= q.R) return PotentialValue::finite(base);
        const double amp = std::pow(center_atom_mass, e);
        auto corr = [&](double r) {
            const double full = g(r);
            const double head = amp * std::pow(r, theta - 1.0);
            return std::max(0.0, full - head);
        };
        const double lo = std::max(support_gap, 0.0);
        return PotentialValue::finite(
            base + adaptive_midpoint_breaks(corr, lo, q.R, std::move(jump_radii), qopt));
    }

    const double r0 = std::max(support_gap, 0.0);
    if (r0 >= q.R) return PotentialValue::finite(0.0);
    return PotentialValue::finite(
        adaptive_midpoint_breaks(g, r0, q.R, std::move(jump_radii), qopt));
}

/// Potential of a Radon measure at the query point.
inline PotentialValue wolff_potential(const RadonMeasure& mu, const WolffQuery& q,
                                      const WolffOptions& opt = {}) {
    if (mu.dim() != q.n) throw std::invalid_argument("wolff_potential: dimension mismatch");
    double center_mass = 0.0;
    std::vector<double> jump_radii;
    for (const auto& a : mu.atoms()) {
        const double d = dist(a.x, q.center, q.n);
        if (d == 0.0) center_mass += a.mass;
        else jump_radii.push_back(d);
    }
    const double gap = mu.second_support_distance(q.center);
    auto ball = [&](double r) { return mu.ball_mass(q.center, r, opt.ball_depth); };
    return wolff_potential_quadrature(ball, center_mass, gap, q, opt, std::move(jump_radii));
}

}  // namespace parawolff
