// Radon measures on the spatial domain: point masses plus an optional
// piecewise-constant density, with closed-ball mass queries.
#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "parawolff/geometry.hpp"
#include "parawolff/params.hpp"

namespace parawolff {

struct Atom {
    Point x{0.0, 0.0};
    double mass = 0.0;
};

/// Nonnegative piecewise-constant density on its own uniform grid
/// (independent of any solver grid), value per cell in mass/volume.
struct DensityGrid {
    int n = 1;
    double side_length = 1.0;
    int cells_per_axis = 1;
    std::vector<double> values;  // row-major, cells_per_axis^n entries

    double h() const { return side_length / cells_per_axis; }
    int num_cells() const {
        int c = cells_per_axis;
        for (int i = 1; i < n; ++i) c *= cells_per_axis;
        return c;
    }
    // Corner coordinates of a cell by linear index.
    std::pair<Point, Point> cell_box(int cell) const {
        const double hh = h();
        const int ix = cell % cells_per_axis;
        const int iy = cell / cells_per_axis;
        Point lo{ix * hh, iy * hh};
        Point hi{(ix + 1) * hh, (iy + 1) * hh};
        if (n == 1) { lo[1] = 0.0; hi[1] = 0.0; }
        return {lo, hi};
    }
    double cell_volume() const {
        double v = h();
        for (int i = 1; i < n; ++i) v *= h();
        return v;
    }
};

namespace detail {

// Volume of box ∩ closed ball by recursive dyadic subdivision. Straddling
// leaves at the depth limit count fully iff their center lies in the ball.
inline double ball_box_overlap(const Point& lo, const Point& hi, const Point& c, double r,
                               int n, int depth) {
    if (dist_point_box(c, lo, hi, n) > r) return 0.0;
    double vol = 1.0;
    for (int i = 0; i < n; ++i) vol *= hi[i] - lo[i];
    if (max_dist_point_box(c, lo, hi, n) <= r) return vol;
    if (depth <= 0) {
        Point mid{0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])};
        return dist(mid, c, n) <= r ? vol : 0.0;
    }
    double acc = 0.0;
    const int children = 1 << n;
    for (int k = 0; k < children; ++k) {
        Point clo = lo, chi = hi;
        for (int i = 0; i < n; ++i) {
            const double m = 0.5 * (lo[i] + hi[i]);
            if (k & (1 << i)) clo[i] = m; else chi[i] = m;
        }
        acc += ball_box_overlap(clo, chi, c, r, n, depth - 1);
    }
    return acc;
}

}  // namespace detail

class RadonMeasure {
public:
    RadonMeasure() = default;

    explicit RadonMeasure(int n, std::vector<Atom> atoms = {},
                          std::optional<DensityGrid> density = std::nullopt)
        : n_(n), atoms_(std::move(atoms)), density_(std::move(density)) {
        if (n_ != 1 && n_ != 2) throw std::invalid_argument("RadonMeasure: n must be 1 or 2");
        for (const auto& a : atoms_)
            if (!(a.mass >= 0.0)) throw std::invalid_argument("RadonMeasure: negative atom mass");
        if (density_) {
            if (density_->n != n_) throw std::invalid_argument("RadonMeasure: density dimension mismatch");
            if (static_cast<int>(density_->values.size()) != density_->num_cells())
                throw std::invalid_argument("RadonMeasure: density cell count mismatch");
            for (double v : density_->values)
                if (!(v >= 0.0)) throw std::invalid_argument("RadonMeasure: negative density value");
        }
    }

    static RadonMeasure atomic(int n, std::vector<Atom> atoms) {
        return RadonMeasure(n, std::move(atoms));
    }

    static RadonMeasure constant_density(int n, double value, double side_length,
                                         int cells_per_axis) {
        DensityGrid g;
        g.n = n;
        g.side_length = side_length;
        g.cells_per_axis = cells_per_axis;
        g.values.assign(static_cast<std::size_t>(g.num_cells()), value);
        return RadonMeasure(n, {}, std::move(g));
    }

    int dim() const { return n_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::optional<DensityGrid>& density() const { return density_; }
    bool empty() const { return atoms_.empty() && !density_; }

    double total_mass() const {
        double m = 0.0;
        for (const auto& a : atoms_) m += a.mass;
        if (density_) {
            const double cv = density_->cell_volume();
            for (double v : density_->values) m += v * cv;
        }
        return m;
    }

    /// mu(closed ball B_r(center)). The density integral uses per-cell
    /// dyadic subdivision of the stated depth on cells straddling the
    /// sphere; interior/exterior cells are resolved exactly.
    double ball_mass(const Point& center, double r, int subdivision_depth = 4) const {
        if (!(r >= 0.0)) throw std::domain_error("ball_mass: negative radius");
        double m = 0.0;
        for (const auto& a : atoms_)
            if (dist(a.x, center, n_) <= r) m += a.mass;
        if (density_) {
            const int cells = density_->num_cells();
            for (int c = 0; c < cells; ++c) {
                const double v = density_->values[static_cast<std::size_t>(c)];
                if (v == 0.0) continue;
                const auto [lo, hi] = density_->cell_box(c);
                const double overlap =
                    detail::ball_box_overlap(lo, hi, center, r, n_, subdivision_depth);
                if (overlap > 0.0) m += v * overlap;
            }
        }
        return m;
    }

    /// Distance from `center` to the nearest support point (+inf for the
    /// empty measure); 0 if an atom sits at the center or the center lies
    /// in a positive-density cell.
    double nearest_support_distance(const Point& center) const {
        return support_distance(center, false);
    }

    /// Distance to the nearest support point other than an atom sitting
    /// exactly at `center`.
    double second_support_distance(const Point& center) const {
        return support_distance(center, true);
    }

    RadonMeasure scaled(double c) const {
        if (!(c >= 0.0)) throw std::invalid_argument("RadonMeasure::scaled: negative factor");
        std::vector<Atom> atoms = atoms_;
        for (auto& a : atoms) a.mass *= c;
        std::optional<DensityGrid> den = density_;
        if (den)
            for (auto& v : den->values) v *= c;
        return RadonMeasure(n_, std::move(atoms), std::move(den));
    }

    /// Sum of two measures; densities must live on the same grid.
    RadonMeasure plus(const RadonMeasure& other) const {
        if (other.n_ != n_) throw std::invalid_argument("RadonMeasure::plus: dimension mismatch");
        std::vector<Atom> atoms = atoms_;
        atoms.insert(atoms.end(), other.atoms_.begin(), other.atoms_.end());
        std::optional<DensityGrid> den = density_;
        if (other.density_) {
            if (!den) {
                den = other.density_;
            } else {
                if (den->cells_per_axis != other.density_->cells_per_axis ||
                    den->side_length != other.density_->side_length)
                    throw std::invalid_argument("RadonMeasure::plus: density grids differ");
                for (std::size_t i = 0; i < den->values.size(); ++i)
                    den->values[i] += other.density_->values[i];
            }
        }
        return RadonMeasure(n_, std::move(atoms), std::move(den));
    }

private:
    double support_distance(const Point& center, bool skip_center_atoms) const {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& a : atoms_) {
            if (a.mass == 0.0) continue;
            const double d = dist(a.x, center, n_);
            if (skip_center_atoms && d == 0.0) continue;
            best = std::min(best, d);
        }
        if (density_) {
            const int cells = density_->num_cells();
            for (int c = 0; c < cells; ++c) {
                if (density_->values[static_cast<std::size_t>(c)] == 0.0) continue;
                const auto [lo, hi] = density_->cell_box(c);
                best = std::min(best, dist_point_box(center, lo, hi, n_));
            }
        }
        return best;
    }

    int n_ = 1;
    std::vector<Atom> atoms_;
    std::optional<DensityGrid> density_;
};

/// Mass attributed to each cell of a solver grid: an atom goes wholly to
/// its containing cell (an atom exactly on a face goes to the smaller
/// adjacent index, per axis), a density is integrated exactly by box
/// overlap.
inline std::vector<double> cell_measure_masses(const RadonMeasure& mu, const Domain& dom, int n) {
    const int N = dom.cells_per_axis;
    const double h = dom.h();
    int cells = N;
    for (int i = 1; i < n; ++i) cells *= N;
    std::vector<double> masses(static_cast<std::size_t>(cells), 0.0);

    auto axis_cell = [&](double x) {
        const double raw = x / h;
        int ic = static_cast<int>(std::floor(raw));
        if (static_cast<double>(ic) == raw && ic > 0) ic -= 1;  // face tie
        if (ic < 0) ic = 0;
        if (ic > N - 1) ic = N - 1;
        return ic;
    };
    for (const auto& a : mu.atoms()) {
        int idx = axis_cell(a.x[0]);
        if (n == 2) idx += axis_cell(a.x[1]) * N;
        masses[static_cast<std::size_t>(idx)] += a.mass;
    }

    if (mu.density()) {
        const DensityGrid& g = *mu.density();
        auto overlap1d = [](double alo, double ahi, double blo, double bhi) {
            return std::max(0.0, std::min(ahi, bhi) - std::max(alo, blo));
        };
        for (int c = 0; c < cells; ++c) {
            const int ix = c % N;
            const int iy = c / N;
            const double xlo = ix * h, xhi = (ix + 1) * h;
            const double ylo = iy * h, yhi = (iy + 1) * h;
            double acc = 0.0;
            const int gcells = g.num_cells();
            for (int gc = 0; gc < gcells; ++gc) {
                const double v = g.values[static_cast<std::size_t>(gc)];
                if (v == 0.0) continue;
                const auto [lo, hi] = g.cell_box(gc);
                double ov = overlap1d(xlo, xhi, lo[0], hi[0]);
                if (n == 2) ov *= overlap1d(ylo, yhi, lo[1], hi[1]);
                acc += v * ov;
            }
            masses[static_cast<std::size_t>(c)] += acc;
        }
    }
    return masses;
}

}  // namespace parawolff
