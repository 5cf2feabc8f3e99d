#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "haptosim/error.hpp"

namespace haptosim {

/// Cell-averaged values on a Grid1D (one entry per cell).
using Field = std::vector<double>;

/// Uniform cell-centered grid on [a,b].
class Grid1D {
public:
    Grid1D(double a, double b, std::size_t n) : a_(a), b_(b), n_(n) {
        if (!(a < b)) throw Error(ErrorKind::InvalidValue, "grid requires a < b");
        if (n < 4) throw Error(ErrorKind::InvalidValue, "grid requires at least 4 cells");
        h_ = (b - a) / static_cast<double>(n);
    }

    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    double length() const noexcept { return b_ - a_; }
    std::size_t n() const noexcept { return n_; }
    double h() const noexcept { return h_; }

    double center(std::size_t i) const noexcept { return a_ + (static_cast<double>(i) + 0.5) * h_; }
    double face(std::size_t f) const noexcept { return a_ + static_cast<double>(f) * h_; }

    std::vector<double> centers() const {
        std::vector<double> c(n_);
        for (std::size_t i = 0; i < n_; ++i) c[i] = center(i);
        return c;
    }

    std::vector<double> faces() const {
        std::vector<double> f(n_ + 1);
        for (std::size_t i = 0; i <= n_; ++i) f[i] = face(i);
        return f;
    }

    Field sample(const std::function<double(double)>& fn) const {
        Field v(n_);
        for (std::size_t i = 0; i < n_; ++i) v[i] = fn(center(i));
        return v;
    }

    Field constant(double value) const { return Field(n_, value); }

private:
    double a_;
    double b_;
    std::size_t n_;
    double h_;
};

/// Face gradient with homogeneous Neumann closure: n+1 values, boundary faces are zero.
inline std::vector<double> face_gradient(std::span<const double> v, const Grid1D& grid) {
    const std::size_t n = grid.n();
    std::vector<double> g(n + 1, 0.0);
    for (std::size_t f = 1; f < n; ++f) g[f] = (v[f] - v[f - 1]) / grid.h();
    return g;
}

/// Arithmetic face average; boundary faces copy the adjacent cell.
inline std::vector<double> face_average(std::span<const double> v) {
    const std::size_t n = v.size();
    std::vector<double> avg(n + 1);
    avg[0] = v[0];
    avg[n] = v[n - 1];
    for (std::size_t f = 1; f < n; ++f) avg[f] = 0.5 * (v[f - 1] + v[f]);
    return avg;
}

/// Cellwise divergence of a face flux vector (n+1 entries).
inline Field divergence(std::span<const double> flux, const Grid1D& grid) {
    Field d(grid.n());
    for (std::size_t i = 0; i < grid.n(); ++i) d[i] = (flux[i + 1] - flux[i]) / grid.h();
    return d;
}

inline double integrate(std::span<const double> v, const Grid1D& grid) {
    return grid.h() * std::accumulate(v.begin(), v.end(), 0.0);
}

/// Integral restricted to the cells where mask[i] is true.
inline double integrate(std::span<const double> v, const Grid1D& grid, const std::vector<bool>& mask) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (mask[i]) s += v[i];
    return grid.h() * s;
}

struct DegeneracyMask {
    std::vector<bool> zero_cells;
    std::vector<bool> positive_cells;
    std::vector<bool> interior_zero_cells;

    std::size_t count_zero() const { return static_cast<std::size_t>(std::count(zero_cells.begin(), zero_cells.end(), true)); }
    std::size_t count_interior() const {
        return static_cast<std::size_t>(std::count(interior_zero_cells.begin(), interior_zero_cells.end(), true));
    }
};

/// Splits cells into {d = 0} and {d > 0}. A zero cell is interior when every
/// interface face to a positive cell lies at least `margin` away from its center.
inline DegeneracyMask classify(std::span<const double> d, const Grid1D& grid, double tol_zero, double margin) {
    if (tol_zero < 0.0) throw Error(ErrorKind::InvalidValue, "tol_zero must be nonnegative");
    const std::size_t n = grid.n();
    DegeneracyMask mask;
    mask.zero_cells.resize(n);
    mask.positive_cells.resize(n);
    mask.interior_zero_cells.assign(n, false);
    std::vector<double> interfaces;
    for (std::size_t i = 0; i < n; ++i) {
        mask.zero_cells[i] = d[i] <= tol_zero;
        mask.positive_cells[i] = !mask.zero_cells[i];
    }
    for (std::size_t f = 1; f < n; ++f)
        if (mask.zero_cells[f - 1] != mask.zero_cells[f]) interfaces.push_back(grid.face(f));
    for (std::size_t i = 0; i < n; ++i) {
        if (!mask.zero_cells[i]) continue;
        double dist = std::numeric_limits<double>::infinity();
        for (double x : interfaces) dist = std::min(dist, std::abs(grid.center(i) - x));
        mask.interior_zero_cells[i] = dist >= margin;
    }
    return mask;
}

/// Default zero tolerance: 1e-14 relative to max d.
inline double default_tol_zero(std::span<const double> d) {
    double m = 0.0;
    for (double v : d) m = std::max(m, v);
    return 1e-14 * m;
}

} // namespace haptosim
