// Adaptive dyadic-panel midpoint quadrature.
//
// Panels are refined while the two-panel estimate still moves the total by
// more than the tolerance budget assigned to them; the budget halves with
// each split so the accepted leaves stay within rel_tol of the whole.
#pragma once

#include <cmath>
#include <algorithm>
#include <cstdint>
#include <vector>

namespace parawolff {

struct QuadratureOptions {
    double rel_tol = 1e-10;
    int max_depth = 40;      // dyadic depth measured from the full interval
    int initial_splits = 6;  // start from 2^initial_splits uniform panels
};

namespace detail {

template <class F>
double adapt_panel(F& f, double a, double b, double fm, double eps, int depth, int max_depth) {
    const double m = 0.5 * (a + b);
    const double fl = f(0.5 * (a + m));
    const double fr = f(0.5 * (m + b));
    const double coarse = (b - a) * fm;
    const double fine = 0.5 * (b - a) * (fl + fr);
    const double diff = std::abs(fine - coarse);
    // The second acceptance clause stops refinement once the mismatch is
    // pure roundoff, so a zero tolerance budget cannot recurse forever.
    if (depth >= max_depth || diff <= eps ||
        diff <= 4e-16 * (std::abs(fine) + std::abs(coarse))) {
        return fine + (fine - coarse) / 3.0;
    }
    return adapt_panel(f, a, m, fl, 0.5 * eps, depth + 1, max_depth) +
           adapt_panel(f, m, b, fr, 0.5 * eps, depth + 1, max_depth);
}

}  // namespace detail

/// Integrates f over [a, b]. Intended for nonnegative integrands that are
/// smooth inside the interval; known discontinuities must be supplied as
/// panel breaks (adaptive_midpoint_breaks below), since a jump hiding
/// between sample points is invisible to the refinement test.
template <class F>
double adaptive_midpoint(F&& f, double a, double b, const QuadratureOptions& opt = {}) {
    if (!(b > a)) return 0.0;
    const int panels = 1 << opt.initial_splits;
    const double w = (b - a) / panels;
    std::vector<double> mids(static_cast<std::size_t>(panels));
    double coarse_total = 0.0;
    for (int i = 0; i < panels; ++i) {
        mids[static_cast<std::size_t>(i)] = f(a + (i + 0.5) * w);
        coarse_total += w * mids[static_cast<std::size_t>(i)];
    }
    const double eps_panel = opt.rel_tol * std::abs(coarse_total) / panels;
    double total = 0.0;
    for (int i = 0; i < panels; ++i) {
        total += detail::adapt_panel(f, a + i * w, a + (i + 1) * w,
                                     mids[static_cast<std::size_t>(i)], eps_panel,
                                     opt.initial_splits, opt.max_depth);
    }
    return total;
}

/// Integrates f over [a, b] with the interval split at the given break
/// points (jump locations), so that every adaptive panel sees a smooth
/// integrand. Breaks outside (a, b) are ignored.
template <class F>
double adaptive_midpoint_breaks(F&& f, double a, double b, std::vector<double> breaks,
                                const QuadratureOptions& opt = {}) {
    if (!(b > a)) return 0.0;
    std::sort(breaks.begin(), breaks.end());
    double total = 0.0;
    double lo = a;
    for (double brk : breaks) {
        if (brk <= lo) continue;
        if (brk >= b) break;
        total += adaptive_midpoint(f, lo, brk, opt);
        lo = brk;
    }
    total += adaptive_midpoint(f, lo, b, opt);
    return total;
}

}  // namespace parawolff
