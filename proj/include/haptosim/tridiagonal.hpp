#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "haptosim/error.hpp"

namespace haptosim {

/// Tridiagonal system; lower[0] and upper[n-1] are ignored.
struct Tridiagonal {
    std::vector<double> lower;
    std::vector<double> diag;
    std::vector<double> upper;

    explicit Tridiagonal(std::size_t n) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0) {}

    std::size_t size() const { return diag.size(); }

    std::vector<double> apply(std::span<const double> x) const {
        const std::size_t n = size();
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            double s = diag[i] * x[i];
            if (i > 0) s += lower[i] * x[i - 1];
            if (i + 1 < n) s += upper[i] * x[i + 1];
            y[i] = s;
        }
        return y;
    }
};

/// Thomas elimination without pivoting. Stable for the diagonally dominant
/// M-matrices the solver assembles; a vanishing or non-finite pivot is reported.
inline std::vector<double> solve(const Tridiagonal& m, std::span<const double> rhs) {
    const std::size_t n = m.size();
    std::vector<double> c(n), x(n);
    double piv = m.diag[0];
    if (!(std::abs(piv) > 0.0) || !std::isfinite(piv)) throw Error(ErrorKind::LinearSolveFailure, "zero pivot at row 0");
    c[0] = m.upper[0] / piv;
    x[0] = rhs[0] / piv;
    for (std::size_t i = 1; i < n; ++i) {
        piv = m.diag[i] - m.lower[i] * c[i - 1];
        if (!(std::abs(piv) > 0.0) || !std::isfinite(piv))
            throw Error(ErrorKind::LinearSolveFailure, "zero pivot at row " + std::to_string(i));
        c[i] = i + 1 < n ? m.upper[i] / piv : 0.0;
        x[i] = (rhs[i] - m.lower[i] * x[i - 1]) / piv;
    }
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
    return x;
}

} // namespace haptosim
