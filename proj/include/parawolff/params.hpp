// Problem constants and grid geometry shared by every module.
#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace parawolff {

/// Scalar parameters of the evolution problem and of the level-set
/// iteration. Values accepted by validate() are usable by every
/// downstream routine without further range checks.
struct Params {
    int n = 1;                  // spatial dimension, 1 or 2
    double p = 3.0;             // diffusion exponent, degenerate for p > 2
    double lambda = 0.5;        // interpolation exponent, in (0, 1/n]
    double kappa = 0.1;         // level-selection threshold, in (0, 1)
    double eps_split = 0.1;     // small/large split threshold, in (0, 1)
    double c1 = 1.0;            // lower structure constant (model case: 1)
    double c2 = 1.0;            // upper structure constant (model case: 1)
    double k_cutoff = 5.0;      // cutoff exponent, must exceed p
    double eps_reg = 1e-8;      // gradient regularization of the flux
    double tol_root = 1e-9;    // bisection tolerance for level selection
    double tol_newton = 1e-9;  // nonlinear-solve gradient tolerance
    double gamma_cap = 100.0;   // cap for empirical constants in reports
};

/// Uniform cell-centered grid over (0, side_length)^n evolved on
/// uniform time levels 0, dt, ..., t_final.
struct Domain {
    double side_length = 1.0;
    int cells_per_axis = 64;
    double t_final = 0.25;
    double dt = 1e-3;

    double h() const { return side_length / cells_per_axis; }

    // Number of stored time levels, counting the initial one.
    int time_levels() const {
        return static_cast<int>(std::llround(t_final / dt)) + 1;
    }

    // Horizon actually represented on the grid (t_final snapped to a
    // whole number of steps).
    double t_end() const { return (time_levels() - 1) * dt; }
};

struct ValidationResult {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// Checks every parameter invariant. Total: any finite (or non-finite)
/// numeric input yields a result, never an abort; a NaN fails the
/// corresponding range check and is reported as a violation.
inline ValidationResult validate(const Params& prm, const Domain& dom) {
    ValidationResult res;
    auto require = [&res](bool cond, const char* name) {
        if (!cond) res.violations.emplace_back(name);
    };
    require(prm.n == 1 || prm.n == 2, "n in {1, 2}");
    require(prm.p >= 2.0, "p >= 2");
    require(prm.lambda > 0.0 && prm.lambda <= 1.0 / prm.n, "0 < lambda <= 1/n");
    require(prm.kappa > 0.0 && prm.kappa < 1.0, "0 < kappa < 1");
    require(prm.eps_split > 0.0 && prm.eps_split < 1.0, "0 < eps_split < 1");
    require(prm.c1 > 0.0, "c1 > 0");
    require(prm.c1 <= prm.c2, "c1 <= c2");
    require(prm.k_cutoff > prm.p, "k_cutoff > p");
    require(prm.eps_reg > 0.0, "eps_reg > 0");
    require(prm.tol_root > 0.0, "tol_root > 0");
    require(prm.tol_newton > 0.0, "tol_newton > 0");
    require(prm.gamma_cap > 0.0, "gamma_cap > 0");
    require(dom.side_length > 0.0, "side_length > 0");
    require(dom.cells_per_axis >= 4, "cells_per_axis >= 4");
    require(dom.dt > 0.0, "dt > 0");
    require(dom.t_final >= dom.dt, "t_final >= dt");
    return res;
}

}  // namespace parawolff
