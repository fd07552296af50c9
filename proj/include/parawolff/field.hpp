// Space-time solution fields on a uniform cell-centered grid.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "parawolff/geometry.hpp"
#include "parawolff/params.hpp"

namespace parawolff {

/// Discrete field u indexed by (time level, cell). Cells on the outermost
/// ring are Dirichlet cells: they carry their prescribed value at every
/// time level. Values are cell-centered; u(y, s) is read as the value of
/// the containing cell at the nearest level.
class GridField {
public:
    GridField(const Domain& dom, int n)
        : dom_(dom), n_(n), N_(dom.cells_per_axis) {
        if (n_ != 1 && n_ != 2) throw std::invalid_argument("GridField: n must be 1 or 2");
        cells_ = N_;
        for (int i = 1; i < n_; ++i) cells_ *= N_;
        levels_ = dom.time_levels();
        values_.assign(static_cast<std::size_t>(cells_) * levels_, 0.0);
    }

    const Domain& domain() const { return dom_; }
    int dim() const { return n_; }
    int cells_per_axis() const { return N_; }
    int num_cells() const { return cells_; }
    int num_levels() const { return levels_; }
    double h() const { return dom_.h(); }
    double dt() const { return dom_.dt; }
    double t_end() const { return dom_.t_end(); }

    double at(int level, int cell) const {
        return values_[static_cast<std::size_t>(level) * cells_ + cell];
    }
    double& at(int level, int cell) {
        return values_[static_cast<std::size_t>(level) * cells_ + cell];
    }

    int cell_index(int ix, int iy = 0) const { return n_ == 1 ? ix : iy * N_ + ix; }

    Point cell_center(int cell) const {
        const double h = dom_.h();
        const int ix = cell % N_;
        const int iy = cell / N_;
        return n_ == 1 ? Point{(ix + 0.5) * h, 0.0}
                       : Point{(ix + 0.5) * h, (iy + 0.5) * h};
    }

    bool is_boundary(int cell) const {
        const int ix = cell % N_;
        if (ix == 0 || ix == N_ - 1) return true;
        if (n_ == 2) {
            const int iy = cell / N_;
            if (iy == 0 || iy == N_ - 1) return true;
        }
        return false;
    }

    /// Containing cell of a point; a coordinate exactly on a cell face is
    /// assigned to the smaller adjacent index.
    int containing_cell(const Point& x) const {
        auto axis_cell = [&](double v) {
            const double raw = v / dom_.h();
            int ic = static_cast<int>(std::floor(raw));
            if (static_cast<double>(ic) == raw && ic > 0) ic -= 1;
            if (ic < 0) ic = 0;
            if (ic > N_ - 1) ic = N_ - 1;
            return ic;
        };
        return n_ == 1 ? axis_cell(x[0]) : cell_index(axis_cell(x[0]), axis_cell(x[1]));
    }

    int nearest_level(double t) const {
        int m = static_cast<int>(std::llround(t / dom_.dt));
        if (m < 0) m = 0;
        if (m > levels_ - 1) m = levels_ - 1;
        return m;
    }

    /// Reads the field at a space-time point (cell value at the nearest
    /// level), the grid proxy for a Lebesgue-point evaluation.
    double value_at(const Point& x, double t) const {
        return at(nearest_level(t), containing_cell(x));
    }

private:
    Domain dom_;
    int n_;
    int N_;
    int cells_ = 0;
    int levels_ = 0;
    std::vector<double> values_;
};

}  // namespace parawolff
