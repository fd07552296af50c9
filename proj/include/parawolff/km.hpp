// Level-set iteration machinery on a discrete solution: the truncation
// profile G, the integrated profile psi, the normalized level-excess
// functional A_j(l), the cap-or-root gap selection, and the intrinsic
// cylinders whose time extent scales like delta^(2-p) rho^p.
#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "parawolff/field.hpp"
#include "parawolff/geometry.hpp"
#include "parawolff/measure.hpp"
#include "parawolff/params.hpp"
#include "parawolff/quadrature.hpp"

namespace parawolff {

/// Truncation profile: u above 1, u^(2-2*lambda) on (0, 1], 0 at 0.
inline double G(double u, double lambda) {
    if (!(u >= 0.0)) throw std::domain_error("G: negative argument");
    if (u == 0.0) return 0.0;
    if (u > 1.0) return u;
    return std::pow(u, 2.0 - 2.0 * lambda);
}

/// Integrated profile: for u > l,
///
///   psi = ∫_0^{(u-l)/delta} (1+z)^(-(1-lambda)/p) z^(-2 lambda/p) dz,
///
/// 0 otherwise. The endpoint singularity z^(-2 lambda/p) is integrable
/// (2 lambda/p < 1) and handled by a short power-series head.
inline double psi(double u, double l, double delta, double lambda, double p,
                  const QuadratureOptions& opt = {1e-12, 40, 6}) {
    if (!(delta > 0.0)) throw std::domain_error("psi: delta must be positive");
    if (!(u > l)) return 0.0;
    const double zeta = (u - l) / delta;
    const double a = 2.0 * lambda / p;
    const double b = (1.0 - lambda) / p;
    if (!(a < 1.0)) throw std::domain_error("psi: non-integrable profile (2 lambda >= p)");

    const double z_head = std::min(zeta, 1e-3);
    // (1+z)^(-b) = 1 - b z + b(b+1)/2 z^2 - b(b+1)(b+2)/6 z^3 + O(z^4)
    const double c1 = -b;
    const double c2 = 0.5 * b * (b + 1.0);
    const double c3 = -b * (b + 1.0) * (b + 2.0) / 6.0;
    double head = std::pow(z_head, 1.0 - a) / (1.0 - a);
    head += c1 * std::pow(z_head, 2.0 - a) / (2.0 - a);
    head += c2 * std::pow(z_head, 3.0 - a) / (3.0 - a);
    head += c3 * std::pow(z_head, 4.0 - a) / (4.0 - a);
    if (zeta <= z_head) return head;

    auto integrand = [&](double z) { return std::pow(1.0 + z, -b) * std::pow(z, -a); };
    return head + adaptive_midpoint(integrand, z_head, zeta, opt);
}

/// Exponent of the profile inequality  c psi^(rho(lambda)) <= (u-l)/delta.
inline double psi_power(double p, double lambda) { return p / (p - 1.0 - lambda); }

/// Smooth space-time bump: 1 on the inner half-ball over the inner 3/4
/// time window, 0 outside B_rho_j x (s +- delta^(2-p) rho_j^p). The
/// smoothstep profile keeps |grad| <= 3/rho_j and |d/dt| <= 6 delta^(p-2)
/// rho_j^(-p), within the required gradient bounds.
inline double cutoff(const Point& x, double t, const Point& y, double s, double rho_j,
                     double delta, const Params& prm) {
    const double w_t = std::pow(delta, 2.0 - prm.p) * std::pow(rho_j, prm.p);
    const double r = dist(x, y, prm.n);
    double sx;
    if (r <= 0.5 * rho_j) sx = 1.0;
    else if (r >= rho_j) sx = 0.0;
    else sx = smoothstep((rho_j - r) / (0.5 * rho_j));
    const double tau = std::abs(t - s);
    double st;
    if (tau <= 0.75 * w_t) st = 1.0;
    else if (tau >= w_t) st = 0.0;
    else st = smoothstep((w_t - tau) / (0.25 * w_t));
    return sx * st;
}

/// Intrinsic cylinder B_rho(y) x (s - delta^(2-p) rho^p, s + ...).
struct Cylinder {
    Point center{0.0, 0.0};
    double s = 0.0;
    double rho = 0.0;
    double delta = 1.0;

    double time_half_width(double p) const { return std::pow(delta, 2.0 - p) * std::pow(rho, p); }
    bool contained_in(const Domain& dom, int n, double p) const {
        for (int a = 0; a < n; ++a)
            if (center[a] - rho < 0.0 || center[a] + rho > dom.side_length) return false;
        const double w = time_half_width(p);
        return s - w >= 0.0 && s + w <= dom.t_end();
    }
};

/// Time levels whose dt-slab [t_m - dt/2, t_m + dt/2] meets the open
/// window (s - half_width, s + half_width): the window snapped outward to
/// level boundaries.
inline std::vector<int> levels_in_window(const GridField& u, double s, double half_width) {
    std::vector<int> out;
    const double dt = u.dt();
    for (int m = 0; m < u.num_levels(); ++m) {
        const double tm = m * dt;
        if (tm + 0.5 * dt > s - half_width && tm - 0.5 * dt < s + half_width) out.push_back(m);
    }
    return out;
}

/// The level-excess functional
///
///   A_j(l) = (l-l_j)^(p-2)/rho_j^(n+p) ∬ ((u-l_j)/(l-l_j))^((1+lambda)(p-1)) xi^(k-p)
///          + sup_t (1/rho_j^n) ∫ G((u-l_j)/(l-l_j)) xi^k
///
/// over the candidate cylinder with gap l - l_j, by midpoint sums over
/// cells and time levels (the time window snapped outward, the sup taken
/// over the included levels). Nonincreasing in l. Throws std::domain_error
/// if the candidate cylinder escapes the space-time domain or l violates
/// the lower bound l_j + rho_j.
inline double A_functional(const GridField& u, const Params& prm, const Point& y, double s,
                           double rho, int j, double l_j, double l) {
    const double rho_j = std::ldexp(rho, -j);
    if (!(l >= l_j + rho_j * (1.0 - 1e-12)))
        throw std::domain_error("A_functional: candidate level below l_j + rho_j");
    const double d = l - l_j;
    const double half_w = std::pow(d, 2.0 - prm.p) * std::pow(rho_j, prm.p);
    const Domain& dom = u.domain();
    for (int a = 0; a < prm.n; ++a)
        if (y[a] - rho_j < 0.0 || y[a] + rho_j > dom.side_length)
            throw std::domain_error("A_functional: cylinder escapes the spatial domain");
    if (s - half_w < 0.0 || s + half_w > u.t_end())
        throw std::domain_error("A_functional: cylinder escapes the time horizon");

    const double h = u.h();
    double hn = h;
    for (int i = 1; i < prm.n; ++i) hn *= h;
    const double dt = u.dt();
    const double e1 = (1.0 + prm.lambda) * (prm.p - 1.0);
    const auto levels = levels_in_window(u, s, half_w);

    double integral = 0.0;
    double sup_term = 0.0;
    for (int m : levels) {
        const double tm = m * dt;
        double slice = 0.0;
        for (int c = 0; c < u.num_cells(); ++c) {
            const Point xc = u.cell_center(c);
            if (dist(xc, y, prm.n) > rho_j) continue;
            const double uv = u.at(m, c);
            if (!(uv > l_j)) continue;
            const double ratio = (uv - l_j) / d;
            const double xi = cutoff(xc, tm, y, s, rho_j, d, prm);
            integral += std::pow(ratio, e1) * std::pow(xi, prm.k_cutoff - prm.p) * hn * dt;
            slice += G(ratio, prm.lambda) * std::pow(xi, prm.k_cutoff) * hn;
        }
        slice /= std::pow(rho_j, prm.n);
        if (slice > sup_term) sup_term = slice;
    }
    const double term1 = std::pow(d, prm.p - 2.0) / std::pow(rho_j, prm.n + prm.p) * integral;
    return term1 + sup_term;
}

enum class KMBranch { CapAccepted, RootFound };

struct KMState {
    int j = 0;
    double rho_j = 0.0;
    double l_j = 0.0;
    double delta_j = 0.0;
    KMBranch branch = KMBranch::CapAccepted;
    double A_value = 0.0;           // A_j at the accepted level l_{j+1}
    bool window_collapsed = false;  // accepted intrinsic window below one level

    double l_next() const { return l_j + delta_j; }
};

class KMFailure : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Root of a nonincreasing functional A(l) = kappa on (l_j + delta_hat,
/// inf), assuming A(l_j + delta_hat) > kappa. Brackets by doubling the
/// offset until A drops below kappa, then bisects; returns the upper end
/// of the final bracket, so the returned level always satisfies
/// A <= kappa. Throws KMFailure if A does not decay within max_doublings.
template <class Fn>
std::pair<double, double> find_level_root(Fn&& A, double l_j, double delta_hat, double kappa,
                                          double tol_root, int max_doublings = 60) {
    double lo = l_j + delta_hat;
    double offset = 2.0 * delta_hat;
    double hi = l_j + offset;
    double a_hi = A(hi);
    int doublings = 0;
    while (!(a_hi < kappa)) {
        lo = hi;
        offset *= 2.0;
        hi = l_j + offset;
        a_hi = A(hi);
        if (++doublings > max_doublings)
            throw KMFailure("find_level_root: functional does not decay below kappa");
    }
    while (hi - lo > tol_root * delta_hat) {
        const double mid = 0.5 * (lo + hi);
        const double a_mid = A(mid);
        if (a_mid <= kappa) {
            hi = mid;
            a_hi = a_mid;
        } else {
            lo = mid;
        }
    }
    return {hi, a_hi};
}

/// The cap-or-root selection: accept the candidate gap delta_hat when
/// A_j(l_j + delta_hat) <= kappa, otherwise move the level to the kappa
/// level line. delta_hat is max{1, rho} at j = 0 and rho_j afterwards.
inline KMState select_level(const GridField& u, const Params& prm, const Point& y, double s,
                            double rho, int j, double l_j) {
    const double rho_j = std::ldexp(rho, -j);
    const double delta_hat = j == 0 ? std::max(1.0, rho) : rho_j;

    KMState state;
    state.j = j;
    state.rho_j = rho_j;
    state.l_j = l_j;

    const double a_cap = A_functional(u, prm, y, s, rho, j, l_j, l_j + delta_hat);
    if (a_cap <= prm.kappa) {
        state.delta_j = delta_hat;
        state.branch = KMBranch::CapAccepted;
        state.A_value = a_cap;
    } else {
        auto fn = [&](double l) { return A_functional(u, prm, y, s, rho, j, l_j, l); };
        const auto [l_next, a_val] = find_level_root(fn, l_j, delta_hat, prm.kappa, prm.tol_root);
        state.delta_j = l_next - l_j;
        state.branch = KMBranch::RootFound;
        state.A_value = a_val;
    }
    state.window_collapsed =
        2.0 * std::pow(state.delta_j, 2.0 - prm.p) * std::pow(rho_j, prm.p) < u.dt();
    return state;
}

enum class KMTermination { ResolutionFloor, IterationCap };

struct LevelSequence {
    std::vector<KMState> states;
    KMTermination termination = KMTermination::IterationCap;

    double l_final() const {
        return states.empty() ? 0.0 : states.back().l_j + states.back().delta_j;
    }
};

/// Runs the full inductive construction from l_0 = 0 until the gap drops
/// below the grid resolution floor h/4 (natural termination) or j_max
/// states have been produced. Requires the outer cylinder
/// B_2rho(y) x (s - 4 rho^2, s + 4 rho^2) inside the space-time domain.
inline LevelSequence run_iteration(const GridField& u, const Params& prm, const Point& y,
                                   double s, double rho, int j_max = 32) {
    if (!(rho > 0.0 && rho < 1.0)) throw std::domain_error("run_iteration: rho must be in (0, 1)");
    const Domain& dom = u.domain();
    for (int a = 0; a < prm.n; ++a)
        if (y[a] - 2.0 * rho < 0.0 || y[a] + 2.0 * rho > dom.side_length)
            throw std::domain_error("run_iteration: outer ball escapes the spatial domain");
    if (s - 4.0 * rho * rho < 0.0 || s + 4.0 * rho * rho > u.t_end())
        throw std::domain_error("run_iteration: outer cylinder escapes the time horizon");

    LevelSequence seq;
    double l_j = 0.0;
    const double floor = u.h() / 4.0;
    for (int j = 0; j < j_max; ++j) {
        KMState state = select_level(u, prm, y, s, rho, j, l_j);
        seq.states.push_back(state);
        l_j = state.l_next();
        if (state.delta_j < floor) {
            seq.termination = KMTermination::ResolutionFloor;
            return seq;
        }
    }
    seq.termination = KMTermination::IterationCap;
    return seq;
}

/// Empirical constant of the gap recursion
///   delta_j <= delta_{j-1}/2 + rho_j + gamma (rho_j^(p-n) mu(B_j))^(1/(p-1)),
/// measured per state: zero when the first two terms already cover the
/// gap, a finite ratio when mass is present, a violation otherwise.
struct RecursionGamma {
    int j = 0;
    double value = 0.0;
    bool violation = false;
};

inline std::vector<RecursionGamma> lemma_recursion_gammas(const LevelSequence& seq,
                                                          const RadonMeasure& mu, const Point& y,
                                                          const Params& prm) {
    std::vector<RecursionGamma> out;
    for (std::size_t i = 1; i < seq.states.size(); ++i) {
        const KMState& cur = seq.states[i];
        const KMState& prev = seq.states[i - 1];
        RecursionGamma g;
        g.j = cur.j;
        const double excess = cur.delta_j - 0.5 * prev.delta_j - cur.rho_j;
        if (excess > 0.0) {
            const double mass = mu.ball_mass(y, cur.rho_j);
            if (mass == 0.0) {
                g.violation = true;
                g.value = std::numeric_limits<double>::infinity();
            } else {
                g.value = excess /
                          std::pow(std::pow(cur.rho_j, prm.p - prm.n) * mass, 1.0 / (prm.p - 1.0));
            }
        }
        out.push_back(g);
    }
    return out;
}

/// The space-time average entering the theorem's right-hand side and the
/// delta_0 bound:
///   ( rho^-(p+n) ∬_{B_rho x (s - rho^p, s + rho^p)} u_+^((1+lambda)(p-1)) )^(1/(1+lambda(p-1)))
/// by midpoint sums, the time window clipped to the solved horizon.
inline double upos_average_term(const GridField& u, const Params& prm, const Point& y, double s,
                                double rho) {
    const double h = u.h();
    double hn = h;
    for (int i = 1; i < prm.n; ++i) hn *= h;
    const double dt = u.dt();
    const double w = std::pow(rho, prm.p);
    const double e1 = (1.0 + prm.lambda) * (prm.p - 1.0);
    double acc = 0.0;
    for (int m = 0; m < u.num_levels(); ++m) {
        const double tm = m * dt;
        if (tm < s - w || tm > s + w) continue;
        for (int c = 0; c < u.num_cells(); ++c) {
            if (dist(u.cell_center(c), y, prm.n) > rho) continue;
            const double up = std::max(u.at(m, c), 0.0);
            if (up > 0.0) acc += std::pow(up, e1) * hn * dt;
        }
    }
    const double normalized = acc / std::pow(rho, prm.p + prm.n);
    return std::pow(normalized, 1.0 / (1.0 + prm.lambda * (prm.p - 1.0)));
}

/// Right-hand side of the delta_0 estimate: average term + 1 + rho.
inline double delta0_bracket(const GridField& u, const Params& prm, const Point& y, double s,
                             double rho) {
    return upos_average_term(u, prm, y, s, rho) + 1.0 + rho;
}

}  // namespace parawolff
