// Implicit Euler for  u_t - div(|grad u|^(p-2) grad u) = mu  with Dirichlet
// boundary cells. Each step minimizes the strictly convex functional
//
//   J(v) = sum_cells (1/(2 dt)) (v - u_prev)^2 h^n
//        + (1/p)    sum_faces  |grad_h v|_eps^p h^n
//        - sum_cells v mu(cell),
//
// where grad_h is the face-centered difference quotient and
// |g|_eps = sqrt(g^2 + eps_reg^2). Minimization is damped Newton with a
// backtracking line search; convergence is certified by the gradient norm.
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "parawolff/field.hpp"
#include "parawolff/measure.hpp"
#include "parawolff/params.hpp"

namespace parawolff {

struct StepReport {
    int time_level = 0;
    int iterations = 0;
    double grad_norm = 0.0;  // Euclidean norm of grad J at exit
    double energy = 0.0;     // J at the minimizer
    std::vector<double> energy_trajectory;  // J at start and after each iterate
    std::vector<double> grad_trajectory;    // gradient norm per iterate
};

class SolverFailure : public std::runtime_error {
public:
    SolverFailure(int level, double grad_norm, const std::string& what,
                  std::vector<double> grad_trajectory = {})
        : std::runtime_error(what), time_level(level), grad_norm(grad_norm),
          grad_trajectory(std::move(grad_trajectory)) {}
    int time_level;
    double grad_norm;
    std::vector<double> grad_trajectory;
};

struct SolverOptions {
    int max_newton_iters = 200;
    double armijo_c = 1e-4;
    double min_line_step = 1e-14;
};

// Regularized face flux (g^2 + eps^2)^((p-2)/2) g and its derivative;
// strictly monotone for p >= 2, which makes J strictly convex.
inline double face_sigma(double g, double p, double eps) {
    return std::pow(g * g + eps * eps, 0.5 * p - 1.0) * g;
}
inline double face_sigma_prime(double g, double p, double eps) {
    const double s = g * g + eps * eps;
    return std::pow(s, 0.5 * p - 2.0) * ((p - 1.0) * g * g + eps * eps);
}
inline double face_energy_density(double g, double p, double eps) {
    return std::pow(g * g + eps * eps, 0.5 * p) / p;
}

namespace detail {

// Enumerates faces between adjacent cells as (cell_a, cell_b) pairs in a
// fixed order: axis 0 sweeps first, then axis 1.
template <class Fn>
void for_each_face(int n, int N, Fn&& fn) {
    if (n == 1) {
        for (int ix = 0; ix + 1 < N; ++ix) fn(ix, ix + 1);
        return;
    }
    for (int iy = 0; iy < N; ++iy)
        for (int ix = 0; ix + 1 < N; ++ix) fn(iy * N + ix, iy * N + ix + 1);
    for (int iy = 0; iy + 1 < N; ++iy)
        for (int ix = 0; ix < N; ++ix) fn(iy * N + ix, (iy + 1) * N + ix);
}

}  // namespace detail

/// Discrete p-Dirichlet energy (1/p) sum_faces |grad_h u|_eps^p h^n of one
/// time level.
inline double p_dirichlet_energy(const GridField& u, int level, const Params& prm) {
    const int N = u.cells_per_axis();
    const double h = u.h();
    double hn = h;
    for (int i = 1; i < prm.n; ++i) hn *= h;
    double acc = 0.0;
    detail::for_each_face(prm.n, N, [&](int a, int b) {
        const double g = (u.at(level, b) - u.at(level, a)) / h;
        acc += face_energy_density(g, prm.p, prm.eps_reg) * hn;
    });
    return acc;
}

/// One implicit step: returns the minimizer of J given the previous level.
/// `boundary` supplies the fixed values at boundary cells; `cell_masses`
/// is the measure attributed per cell. Throws SolverFailure if Newton does
/// not certify convergence.
inline std::pair<std::vector<double>, StepReport> step_from_masses(
    const std::vector<double>& u_prev, const std::vector<double>& boundary,
    const std::vector<double>& cell_masses, const Params& prm, const Domain& dom,
    int time_level = 0, const SolverOptions& opt = {}) {
    const int n = prm.n;
    const int N = dom.cells_per_axis;
    const double h = dom.h();
    double hn = h;
    for (int i = 1; i < n; ++i) hn *= h;
    const double dt = dom.dt;
    int cells = N;
    for (int i = 1; i < n; ++i) cells *= N;
    if (static_cast<int>(u_prev.size()) != cells || static_cast<int>(boundary.size()) != cells ||
        static_cast<int>(cell_masses.size()) != cells)
        throw std::invalid_argument("step: array sizes do not match the domain");

    GridField probe(dom, n);  // for boundary classification only
    std::vector<int> dof_of(static_cast<std::size_t>(cells), -1);
    std::vector<int> cell_of;
    for (int c = 0; c < cells; ++c) {
        if (!probe.is_boundary(c)) {
            dof_of[static_cast<std::size_t>(c)] = static_cast<int>(cell_of.size());
            cell_of.push_back(c);
        }
    }
    const int ndof = static_cast<int>(cell_of.size());

    std::vector<double> v(u_prev);
    for (int c = 0; c < cells; ++c)
        if (probe.is_boundary(c)) v[static_cast<std::size_t>(c)] = boundary[static_cast<std::size_t>(c)];

    auto energy = [&](const std::vector<double>& w) {
        double acc = 0.0;
        for (int c = 0; c < cells; ++c) {
            const double d = w[static_cast<std::size_t>(c)] - u_prev[static_cast<std::size_t>(c)];
            acc += 0.5 / dt * d * d * hn;
            acc -= w[static_cast<std::size_t>(c)] * cell_masses[static_cast<std::size_t>(c)];
        }
        detail::for_each_face(n, N, [&](int a, int b) {
            const double g = (w[static_cast<std::size_t>(b)] - w[static_cast<std::size_t>(a)]) / h;
            acc += face_energy_density(g, prm.p, prm.eps_reg) * hn;
        });
        return acc;
    };

    auto gradient = [&](const std::vector<double>& w, Eigen::VectorXd& grad) {
        grad.setZero(ndof);
        for (int k = 0; k < ndof; ++k) {
            const int c = cell_of[static_cast<std::size_t>(k)];
            grad[k] = hn / dt * (w[static_cast<std::size_t>(c)] - u_prev[static_cast<std::size_t>(c)]) -
                      cell_masses[static_cast<std::size_t>(c)];
        }
        detail::for_each_face(n, N, [&](int a, int b) {
            const double g = (w[static_cast<std::size_t>(b)] - w[static_cast<std::size_t>(a)]) / h;
            const double s = face_sigma(g, prm.p, prm.eps_reg) * hn / h;
            const int da = dof_of[static_cast<std::size_t>(a)];
            const int db = dof_of[static_cast<std::size_t>(b)];
            if (da >= 0) grad[da] -= s;
            if (db >= 0) grad[db] += s;
        });
    };

    StepReport report;
    report.time_level = time_level;
    report.energy_trajectory.push_back(energy(v));

    Eigen::VectorXd grad(ndof);
    Eigen::SparseMatrix<double> hess(ndof, ndof);
    std::vector<Eigen::Triplet<double>> trips;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol;
    const double tol = prm.tol_newton * hn;

    for (int iter = 0;; ++iter) {
        gradient(v, grad);
        report.grad_norm = grad.norm();
        report.grad_trajectory.push_back(report.grad_norm);
        report.iterations = iter;
        if (report.grad_norm <= tol) break;
        if (iter >= opt.max_newton_iters)
            throw SolverFailure(time_level, report.grad_norm,
                                "step: Newton did not converge at level " +
                                    std::to_string(time_level) + " (grad norm " +
                                    std::to_string(report.grad_norm) + ")",
                                report.grad_trajectory);

        trips.clear();
        for (int k = 0; k < ndof; ++k) trips.emplace_back(k, k, hn / dt);
        detail::for_each_face(n, N, [&](int a, int b) {
            const double g = (v[static_cast<std::size_t>(b)] - v[static_cast<std::size_t>(a)]) / h;
            const double s = face_sigma_prime(g, prm.p, prm.eps_reg) * hn / (h * h);
            const int da = dof_of[static_cast<std::size_t>(a)];
            const int db = dof_of[static_cast<std::size_t>(b)];
            if (da >= 0) trips.emplace_back(da, da, s);
            if (db >= 0) trips.emplace_back(db, db, s);
            if (da >= 0 && db >= 0) {
                trips.emplace_back(da, db, -s);
                trips.emplace_back(db, da, -s);
            }
        });
        hess.setFromTriplets(trips.begin(), trips.end());
        chol.compute(hess);
        if (chol.info() != Eigen::Success)
            throw SolverFailure(time_level, report.grad_norm,
                                "step: Hessian factorization failed", report.grad_trajectory);
        Eigen::VectorXd dir = chol.solve(-grad);

        const double slope = grad.dot(dir);
        const double j0 = report.energy_trajectory.back();
        std::vector<double> trial(v);
        auto apply = [&](double t) {
            for (int k = 0; k < ndof; ++k)
                trial[static_cast<std::size_t>(cell_of[static_cast<std::size_t>(k)])] =
                    v[static_cast<std::size_t>(cell_of[static_cast<std::size_t>(k)])] + t * dir[k];
        };
        // Once the predicted decrease sinks below the roundoff of J the
        // Armijo test is meaningless; certify the full Newton step by the
        // gradient norm instead.
        if (std::abs(slope) <= 1e-13 * (std::abs(j0) + 1e-30)) {
            apply(1.0);
            Eigen::VectorXd trial_grad(ndof);
            gradient(trial, trial_grad);
            if (!(trial_grad.norm() < report.grad_norm))
                throw SolverFailure(time_level, report.grad_norm,
                                    "step: gradient stalled at the numerical floor",
                                    report.grad_trajectory);
            const double j1 = energy(trial);
            v.swap(trial);
            report.energy_trajectory.push_back(j1);
            continue;
        }
        bool accepted = false;
        for (double t = 1.0; t >= opt.min_line_step; t *= 0.5) {
            apply(t);
            const double j1 = energy(trial);
            if (j1 <= j0 + opt.armijo_c * t * slope) {
                v.swap(trial);
                report.energy_trajectory.push_back(j1);
                accepted = true;
                break;
            }
        }
        if (!accepted)
            throw SolverFailure(time_level, report.grad_norm, "step: line search failed",
                                report.grad_trajectory);
    }
    report.energy = report.energy_trajectory.back();
    return {std::move(v), std::move(report)};
}

inline std::pair<std::vector<double>, StepReport> step(const std::vector<double>& u_prev,
                                                       const std::vector<double>& boundary,
                                                       const RadonMeasure& mu, const Params& prm,
                                                       const Domain& dom, int time_level = 0,
                                                       const SolverOptions& opt = {}) {
    return step_from_masses(u_prev, boundary, cell_measure_masses(mu, dom, prm.n), prm, dom,
                            time_level, opt);
}

struct SolveSpec {
    Params params;
    Domain domain;
    std::vector<double> initial;   // per cell
    std::vector<double> boundary;  // per cell, read at boundary cells
    RadonMeasure measure;
};

struct SolveResult {
    GridField field;
    std::vector<StepReport> reports;  // one per computed level
};

/// Runs all implicit steps; boundary cells carry their prescribed value at
/// every level. Step failures propagate with their time level.
inline SolveResult solve(const SolveSpec& spec, const SolverOptions& opt = {}) {
    const auto check = validate(spec.params, spec.domain);
    if (!check.ok())
        throw std::invalid_argument("solve: invalid parameters: " + check.violations.front());
    GridField field(spec.domain, spec.params.n);
    const int cells = field.num_cells();
    if (static_cast<int>(spec.initial.size()) != cells ||
        static_cast<int>(spec.boundary.size()) != cells)
        throw std::invalid_argument("solve: initial/boundary size mismatch");

    std::vector<double> level(spec.initial);
    for (int c = 0; c < cells; ++c)
        if (field.is_boundary(c)) level[static_cast<std::size_t>(c)] = spec.boundary[static_cast<std::size_t>(c)];
    for (int c = 0; c < cells; ++c) field.at(0, c) = level[static_cast<std::size_t>(c)];

    const auto masses = cell_measure_masses(spec.measure, spec.domain, spec.params.n);
    SolveResult result{std::move(field), {}};
    for (int m = 1; m < result.field.num_levels(); ++m) {
        auto [next, report] =
            step_from_masses(level, spec.boundary, masses, spec.params, spec.domain, m, opt);
        level = std::move(next);
        for (int c = 0; c < cells; ++c) result.field.at(m, c) = level[static_cast<std::size_t>(c)];
        result.reports.push_back(std::move(report));
    }
    return result;
}

struct SpaceTimeWindow {
    Point x_lo{0.0, 0.0};
    Point x_hi{0.0, 0.0};
    double t_lo = 0.0;
    double t_hi = 0.0;
};

/// Post-hoc audit of the discrete weak identity: the largest residual of
///
///   (1/dt)(u_m - u_{m-1}, phi) h^n + sum_f sigma(grad_h u_m) grad_h phi h^n
///     - sum phi mu(cell)
///
/// over the basis of single-cell test vectors phi supported at interior
/// cells inside the window.
inline double weak_residual(const GridField& u, const RadonMeasure& mu, const Params& prm,
                            const SpaceTimeWindow& win) {
    const Domain& dom = u.domain();
    for (int a = 0; a < prm.n; ++a)
        if (win.x_lo[a] < 0.0 || win.x_hi[a] > dom.side_length)
            throw std::domain_error("weak_residual: window outside the spatial domain");
    if (win.t_lo < 0.0 || win.t_hi > u.t_end() + 1e-12 * dom.dt)
        throw std::domain_error("weak_residual: window outside the time horizon");

    const int N = u.cells_per_axis();
    const double h = u.h();
    double hn = h;
    for (int i = 1; i < prm.n; ++i) hn *= h;
    const auto masses = cell_measure_masses(mu, dom, prm.n);

    auto in_window = [&](int cell) {
        const Point c = u.cell_center(cell);
        for (int a = 0; a < prm.n; ++a)
            if (c[a] < win.x_lo[a] || c[a] > win.x_hi[a]) return false;
        return true;
    };

    double worst = 0.0;
    for (int m = 1; m < u.num_levels(); ++m) {
        const double tm = m * dom.dt;
        if (tm < win.t_lo || tm > win.t_hi) continue;
        std::vector<double> res(static_cast<std::size_t>(u.num_cells()), 0.0);
        for (int c = 0; c < u.num_cells(); ++c)
            res[static_cast<std::size_t>(c)] =
                hn / dom.dt * (u.at(m, c) - u.at(m - 1, c)) - masses[static_cast<std::size_t>(c)];
        detail::for_each_face(prm.n, N, [&](int a, int b) {
            const double g = (u.at(m, b) - u.at(m, a)) / h;
            const double s = face_sigma(g, prm.p, prm.eps_reg) * hn / h;
            res[static_cast<std::size_t>(a)] -= s;
            res[static_cast<std::size_t>(b)] += s;
        });
        for (int c = 0; c < u.num_cells(); ++c)
            if (!u.is_boundary(c) && in_window(c))
                worst = std::max(worst, std::abs(res[static_cast<std::size_t>(c)]));
    }
    return worst;
}

}  // namespace parawolff
