// End-to-end scenario verification: solve, trace the level iteration,
// evaluate the Wolff potential, and compare the solution value against the
// pointwise bracket  avg + 1 + W(y, 2 rho)  with empirical constants.
#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "parawolff/field.hpp"
#include "parawolff/km.hpp"
#include "parawolff/measure.hpp"
#include "parawolff/params.hpp"
#include "parawolff/solver.hpp"
#include "parawolff/wolff.hpp"

namespace parawolff {

enum class Verdict { Bounded, Vacuous, ViolationFlag };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Bounded: return "BOUNDED";
        case Verdict::Vacuous: return "VACUOUS";
        default: return "VIOLATION";
    }
}

inline const char* to_string(KMBranch b) {
    return b == KMBranch::CapAccepted ? "CAP_ACCEPTED" : "ROOT_FOUND";
}

struct VerificationPoint {
    Point y{0.0, 0.0};
    double s = 0.0;
    double rho = 0.1;
};

/// Containment hypothesis of the pointwise estimate.
inline bool point_admissible(const VerificationPoint& pt, const Domain& dom, int n) {
    if (!(pt.rho > 0.0 && pt.rho < 1.0)) return false;
    for (int a = 0; a < n; ++a)
        if (pt.y[a] - 2.0 * pt.rho < 0.0 || pt.y[a] + 2.0 * pt.rho > dom.side_length) return false;
    const double w = 4.0 * pt.rho * pt.rho;
    return pt.s - w >= 0.0 && pt.s + w <= dom.t_end();
}

struct BracketValue {
    double avg_term = 0.0;
    PotentialValue wolff_term;
    bool divergent() const { return wolff_term.divergent; }
    double total() const { return avg_term + 1.0 + wolff_term.value; }
};

/// The right-hand-side bracket avg + 1 + W(y, 2 rho); divergent Wolff
/// terms propagate as a divergent bracket.
inline BracketValue theorem_rhs_bracket(const GridField& u, const RadonMeasure& mu,
                                        const VerificationPoint& pt, const Params& prm,
                                        const WolffOptions& wopt = {}) {
    if (!point_admissible(pt, u.domain(), prm.n))
        throw std::domain_error("theorem_rhs_bracket: containment hypothesis violated");
    BracketValue b;
    b.avg_term = upos_average_term(u, prm, pt.y, pt.s, pt.rho);
    b.wolff_term = wolff_potential(mu, WolffQuery{pt.y, 2.0 * pt.rho, prm.p, prm.n}, wopt);
    return b;
}

struct PointVerdict {
    VerificationPoint point;
    double u_value = 0.0;
    double avg_term = 0.0;
    PotentialValue wolff_term;
    double bracket = 0.0;      // meaningful when the Wolff term is finite
    double gamma_emp = 0.0;    // u_+(y,s) / bracket
    Verdict verdict = Verdict::Bounded;
    // Independent route through the level iteration.
    LevelSequence trace;
    std::vector<RecursionGamma> recursion;
    double l_final = 0.0;
    double delta0 = 0.0;
    double gamma_delta0 = 0.0;  // delta_0 / (avg + 1 + rho)
    double gamma_l_final = 0.0; // l_J / (delta_0 + rho + W)
    double max_recursion_gamma = 0.0;
    bool recursion_violation = false;
};

/// Evaluates one verification point against a solved field.
inline PointVerdict verify_point(const GridField& u, const RadonMeasure& mu,
                                 const VerificationPoint& pt, const Params& prm,
                                 const WolffOptions& wopt = {}) {
    PointVerdict out;
    out.point = pt;
    out.u_value = u.value_at(pt.y, pt.s);

    const BracketValue b = theorem_rhs_bracket(u, mu, pt, prm, wopt);
    out.avg_term = b.avg_term;
    out.wolff_term = b.wolff_term;

    out.trace = run_iteration(u, prm, pt.y, pt.s, pt.rho);
    out.l_final = out.trace.l_final();
    out.delta0 = out.trace.states.front().delta_j;
    out.gamma_delta0 = out.delta0 / delta0_bracket(u, prm, pt.y, pt.s, pt.rho);
    out.recursion = lemma_recursion_gammas(out.trace, mu, pt.y, prm);
    for (const auto& g : out.recursion) {
        out.recursion_violation = out.recursion_violation || g.violation;
        if (g.value > out.max_recursion_gamma) out.max_recursion_gamma = g.value;
    }

    if (b.divergent()) {
        out.verdict = Verdict::Vacuous;
        out.bracket = std::numeric_limits<double>::infinity();
        out.gamma_emp = 0.0;
        out.gamma_l_final = 0.0;
        return out;
    }
    out.bracket = b.total();
    out.gamma_emp = std::max(out.u_value, 0.0) / out.bracket;
    out.gamma_l_final = out.l_final / (out.delta0 + pt.rho + b.wolff_term.value);
    out.verdict = out.gamma_emp <= prm.gamma_cap ? Verdict::Bounded : Verdict::ViolationFlag;
    return out;
}

struct Rung {
    int cells_per_axis = 0;
    double dt = 0.0;
};

struct InitialSpec {
    enum class Kind { Constant, Gaussian, Linear };
    Kind kind = Kind::Constant;
    double value = 0.0;      // constant value or linear slope amplitude
    Point center{0.5, 0.5};  // gaussian center
    double width = 0.1;      // gaussian width
    double amplitude = 1.0;  // gaussian amplitude
};

struct MeasureSpec {
    std::vector<Atom> atoms;
    std::optional<double> density_const;

    RadonMeasure build(int n, const Domain& dom) const {
        std::optional<DensityGrid> den;
        if (density_const) {
            DensityGrid g;
            g.n = n;
            g.side_length = dom.side_length;
            g.cells_per_axis = dom.cells_per_axis;
            g.values.assign(static_cast<std::size_t>(g.num_cells()), *density_const);
            den = std::move(g);
        }
        return RadonMeasure(n, atoms, std::move(den));
    }
};

struct WolffQuerySpec {
    Point x{0.0, 0.0};
    double R = 1.0;
};

struct Scenario {
    std::string name;
    Params params;
    Domain base_domain;
    std::vector<Rung> rungs;  // refinement ladder; falls back to the base domain
    MeasureSpec measure;
    InitialSpec initial;
    std::optional<double> boundary_const;  // absent: boundary taken from the initial datum
    std::vector<VerificationPoint> points;
    std::vector<WolffQuerySpec> wolff_queries;
    int j_max = 32;

    Domain domain_for(const Rung& r) const {
        Domain d = base_domain;
        d.cells_per_axis = r.cells_per_axis;
        d.dt = r.dt;
        return d;
    }
    std::vector<Rung> ladder() const {
        if (!rungs.empty()) return rungs;
        return {Rung{base_domain.cells_per_axis, base_domain.dt}};
    }
};

inline std::vector<double> build_initial(const InitialSpec& spec, const Domain& dom, int n) {
    GridField probe(dom, n);
    std::vector<double> out(static_cast<std::size_t>(probe.num_cells()), 0.0);
    for (int c = 0; c < probe.num_cells(); ++c) {
        const Point x = probe.cell_center(c);
        double v = 0.0;
        switch (spec.kind) {
            case InitialSpec::Kind::Constant: v = spec.value; break;
            case InitialSpec::Kind::Linear: v = spec.value * x[0] / dom.side_length; break;
            case InitialSpec::Kind::Gaussian: {
                double q = 0.0;
                for (int a = 0; a < n; ++a) {
                    const double d = x[a] - spec.center[a];
                    q += d * d;
                }
                v = spec.amplitude * std::exp(-q / (2.0 * spec.width * spec.width));
                break;
            }
        }
        out[static_cast<std::size_t>(c)] = v;
    }
    return out;
}

inline std::vector<double> build_boundary(const Scenario& scn, const Domain& dom,
                                          const std::vector<double>& initial) {
    if (!scn.boundary_const) return initial;
    return std::vector<double>(initial.size(), *scn.boundary_const);
}

struct RungResult {
    Rung rung;
    SolveResult solved;
    std::vector<PointVerdict> points;
};

struct ScenarioResult {
    std::string name;
    std::vector<RungResult> rungs;
    bool solver_failed = false;
    std::string failure;

    bool has_violation_on_finest() const {
        if (rungs.empty()) return false;
        for (const auto& pv : rungs.back().points)
            if (pv.verdict == Verdict::ViolationFlag) return true;
        return false;
    }
};

/// Solves all requested rungs of one scenario and verifies every point.
/// A step failure stops the scenario and is recorded, never swallowed.
inline ScenarioResult run_scenario(const Scenario& scn, int rung_select = -1,
                                   const SolverOptions& sopt = {}) {
    ScenarioResult result;
    result.name = scn.name;
    const auto ladder = scn.ladder();
    for (std::size_t ri = 0; ri < ladder.size(); ++ri) {
        if (rung_select >= 0 && static_cast<int>(ri) != rung_select) continue;
        const Domain dom = scn.domain_for(ladder[ri]);
        const auto check = validate(scn.params, dom);
        if (!check.ok()) {
            result.solver_failed = true;
            result.failure = "invalid parameters on rung " + std::to_string(ri) + ": " +
                             check.violations.front();
            return result;
        }
        SolveSpec spec;
        spec.params = scn.params;
        spec.domain = dom;
        spec.initial = build_initial(scn.initial, dom, scn.params.n);
        spec.boundary = build_boundary(scn, dom, spec.initial);
        spec.measure = scn.measure.build(scn.params.n, dom);
        try {
            RungResult rr{ladder[ri], solve(spec, sopt), {}};
            for (const auto& pt : scn.points)
                rr.points.push_back(verify_point(rr.solved.field, spec.measure, pt, scn.params));
            result.rungs.push_back(std::move(rr));
        } catch (const SolverFailure& f) {
            result.solver_failed = true;
            result.failure = "rung " + std::to_string(ri) + ": " + f.what();
            return result;
        }
    }
    return result;
}

/// Relative change between consecutive rung values, with a guarded
/// denominator so that a pair of zeros counts as perfectly stable.
inline double relative_delta(double a, double b) {
    const double denom = std::max(std::abs(a), std::abs(b));
    if (denom == 0.0) return 0.0;
    return std::abs(a - b) / denom;
}

}  // namespace parawolff
