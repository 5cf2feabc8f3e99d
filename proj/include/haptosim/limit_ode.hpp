#pragma once

// Pointwise system u' = u f(x,u,w), w' = -u g(w) followed on {d = 0}.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "haptosim/error.hpp"
#include "haptosim/grid.hpp"
#include "haptosim/model_spec.hpp"

namespace haptosim {

struct OdeTrajectory {
    double x = 0.0;
    std::vector<double> times;
    std::vector<double> u_hat;
    std::vector<double> w_hat;

    /// Linear interpolation in t, clamped to the trajectory's range.
    std::pair<double, double> at(double t) const {
        if (t <= times.front()) return {u_hat.front(), w_hat.front()};
        if (t >= times.back()) return {u_hat.back(), w_hat.back()};
        const auto it = std::upper_bound(times.begin(), times.end(), t);
        const std::size_t k = static_cast<std::size_t>(it - times.begin());
        const double s = (t - times[k - 1]) / (times[k] - times[k - 1]);
        return {u_hat[k - 1] + s * (u_hat[k] - u_hat[k - 1]), w_hat[k - 1] + s * (w_hat[k] - w_hat[k - 1])};
    }
};

inline double default_ode_dt(double T) { return std::min(1e-3, T / 1000.0); }

inline OdeTrajectory solve_limit_ode(double x, double u0, double w0, const ProblemSpec& spec,
                                     const DerivedConstants& consts, double T, double dt) {
    if (!(u0 >= 0.0 && w0 >= 0.0)) throw Error(ErrorKind::InvalidValue, "limit ODE needs u0, w0 >= 0");
    if (!(T >= 0.0 && dt > 0.0)) throw Error(ErrorKind::InvalidValue, "limit ODE needs T >= 0 and dt > 0");
    const auto rhs = [&](double u, double w, double& du, double& dw) {
        du = u * spec.f(x, u, w);
        dw = -u * spec.g(w);
    };
    constexpr double slack = 1e-9;
    OdeTrajectory tr;
    tr.x = x;
    const auto record = [&](double t, double u, double w) {
        const double u_cap = u0 * std::exp(consts.rhoM * t);
        if (u < -slack || w < -slack || w > consts.M + slack || u > u_cap * (1.0 + slack) + slack)
            throw Error(ErrorKind::InvariantViolation, "limit ODE bounds broken at x = " + std::to_string(x) +
                                                           ", t = " + std::to_string(t));
        tr.times.push_back(t);
        tr.u_hat.push_back(u);
        tr.w_hat.push_back(w);
    };

    const std::size_t steps = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
    const double k = steps > 0 ? T / static_cast<double>(steps) : 0.0;
    double u = u0, w = w0;
    record(0.0, u, w);
    for (std::size_t s = 0; s < steps; ++s) {
        double a1, b1, a2, b2, a3, b3, a4, b4;
        rhs(u, w, a1, b1);
        rhs(u + 0.5 * k * a1, w + 0.5 * k * b1, a2, b2);
        rhs(u + 0.5 * k * a2, w + 0.5 * k * b2, a3, b3);
        rhs(u + k * a3, w + k * b3, a4, b4);
        u += k / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
        w += k / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
        record(static_cast<double>(s + 1) * k, u, w);
    }
    return tr;
}

struct LimitField {
    std::vector<std::size_t> cells;
    std::vector<OdeTrajectory> trajectories;
};

/// One trajectory per zero cell. `w_init` overrides the w0 samples (e.g. with w0_eps).
inline LimitField solve_limit_field(const DegeneracyMask& mask, const ProblemSpec& spec, const DerivedConstants& consts,
                                    const Grid1D& grid, double T, double dt, const Field* w_init = nullptr) {
    LimitField out;
    for (std::size_t i = 0; i < grid.n(); ++i) {
        if (!mask.zero_cells[i]) continue;
        const double x = grid.center(i);
        const double w = w_init ? (*w_init)[i] : spec.w0(x);
        try {
            out.trajectories.push_back(solve_limit_ode(x, spec.u0(x), w, spec, consts, T, dt));
        } catch (const Error& e) {
            throw Error(e.kind(), "cell " + std::to_string(i) + ": " + e.detail());
        }
        out.cells.push_back(i);
    }
    return out;
}

} // namespace haptosim
