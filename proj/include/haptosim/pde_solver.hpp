#pragma once

// IMEX finite-volume integrator for one regularization level.
//
// u: implicit second difference of q = d_eps u (reflecting ghost cells),
//    explicit upwind taxis flux V u with V = d_eps w_x / (1 + eta u)^2,
//    explicit reaction u f.
// w: lagged-coefficient implicit diffusion eps (w_x / sqrt(g(w)))_x,
//    explicit absorption u/(1 + eta u) g(w).
//
// Every flux vanishes on boundary faces, so the discrete mass changes only
// through the reaction term.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "haptosim/error.hpp"
#include "haptosim/functionals.hpp"
#include "haptosim/grid.hpp"
#include "haptosim/model_spec.hpp"
#include "haptosim/regularization.hpp"
#include "haptosim/tridiagonal.hpp"

namespace haptosim {

struct StepControls {
    double cfl = 0.45;
    double dt_max = 1e-3;
    double tol_lb = 1e-8;
    double tol_ub = 1e-8;
    bool theta_w = true;
    // blow-up detector ceilings
    double u_ceiling = 1e8;
    double w_ceiling = 1e8;      ///< max|w| + max|w_x|
    double inv_g_ceiling = 1e12; ///< max 1/g(w)

    bool operator==(const StepControls&) const = default;
};

struct Snapshot {
    double t = 0.0;
    Field u;
    Field w;
};

enum class RunStatus { Completed, BlowUpDetected };

struct RunResult {
    double eps = 0.0;
    std::vector<Snapshot> snapshots;
    std::vector<StepRecord> series;
    RunStatus status = RunStatus::Completed;
    double failure_time = 0.0;
    std::string failure_quantity;
    bool within_gate = true; ///< false when T exceeds the level's gate

    bool completed() const { return status == RunStatus::Completed; }
};

namespace detail {

inline double taxis_velocity(const State& s, const RegLevel& lv, double h, std::size_t f, double& u_upwind) {
    const double wx = (s.w[f] - s.w[f - 1]) / h;
    u_upwind = wx >= 0.0 ? s.u[f - 1] : s.u[f];
    const double sat = 1.0 + lv.eta_eps * u_upwind;
    return lv.d_face[f] * wx / (sat * sat);
}

} // namespace detail

inline double stable_dt(const State& s, const RegLevel& lv, const ProblemSpec& spec, const DerivedConstants& consts,
                        const Grid1D& grid, const StepControls& ctl) {
    const std::size_t n = grid.n();
    const double h = grid.h();
    double vmax = 0.0;
    double guard_w = HUGE_VAL;
    for (std::size_t f = 1; f < n; ++f) {
        double uup = 0.0;
        vmax = std::max(vmax, std::abs(detail::taxis_velocity(s, lv, h, f, uup)));
        if (!ctl.theta_w) {
            const double gw = spec.g(0.5 * (s.w[f] + s.w[f - 1]));
            guard_w = std::min(guard_w, std::sqrt(std::max(gw, 0.0)) / (lv.eps + 1e-300));
        }
    }
    double dt = ctl.dt_max;
    if (vmax > 0.0) dt = std::min(dt, ctl.cfl * h / vmax);
    if (!ctl.theta_w) dt = std::min(dt, ctl.cfl * h * h * std::min(1.0, guard_w));
    // explicit absorption and reaction must not flip signs
    double absorb = 0.0, sink = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        absorb = std::max(absorb, s.u[i] / (1.0 + lv.eta_eps * s.u[i]));
        sink = std::max(sink, spec.f_minus(grid.center(i), s.u[i], s.w[i]));
    }
    if (absorb * consts.Gamma > 0.0) dt = std::min(dt, ctl.cfl / (absorb * consts.Gamma));
    if (sink > 0.0) dt = std::min(dt, ctl.cfl / sink);
    return dt;
}

inline State step(const State& s, double dt, const RegLevel& lv, const ProblemSpec& spec, const Grid1D& grid,
                  const StepControls& ctl) {
    const std::size_t n = grid.n();
    const double h = grid.h();
    const double r = dt / (h * h);

    std::vector<double> flux(n + 1, 0.0);
    for (std::size_t f = 1; f < n; ++f) {
        double uup = 0.0;
        flux[f] = detail::taxis_velocity(s, lv, h, f, uup) * uup;
    }

    State next;
    next.t = s.t + dt;

    {
        std::vector<double> rhs(n);
        for (std::size_t i = 0; i < n; ++i)
            rhs[i] = s.u[i] - dt / h * (flux[i + 1] - flux[i]) + dt * s.u[i] * spec.f(grid.center(i), s.u[i], s.w[i]);
        Tridiagonal m(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double links = (i > 0 ? 1.0 : 0.0) + (i + 1 < n ? 1.0 : 0.0);
            m.diag[i] = 1.0 + r * links * lv.d_eps[i];
            if (i > 0) m.lower[i] = -r * lv.d_eps[i - 1];
            if (i + 1 < n) m.upper[i] = -r * lv.d_eps[i + 1];
        }
        next.u = solve(m, rhs);
    }

    {
        std::vector<double> coef(n), cface(n + 1, 0.0), rhs(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double gw = spec.g(s.w[i]);
            if (!(gw > 0.0)) throw Error(ErrorKind::PositivityLoss, "g(w) <= 0 in cell " + std::to_string(i));
            coef[i] = lv.eps / std::sqrt(gw);
            rhs[i] = s.w[i] - dt * s.u[i] / (1.0 + lv.eta_eps * s.u[i]) * gw;
        }
        for (std::size_t f = 1; f < n; ++f) cface[f] = 0.5 * (coef[f - 1] + coef[f]);
        if (ctl.theta_w) {
            Tridiagonal m(n);
            for (std::size_t i = 0; i < n; ++i) {
                m.diag[i] = 1.0 + r * (cface[i] + cface[i + 1]);
                if (i > 0) m.lower[i] = -r * cface[i];
                if (i + 1 < n) m.upper[i] = -r * cface[i + 1];
            }
            next.w = solve(m, rhs);
        } else {
            next.w.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double right = i + 1 < n ? cface[i + 1] * (s.w[i + 1] - s.w[i]) : 0.0;
                const double left = i > 0 ? cface[i] * (s.w[i] - s.w[i - 1]) : 0.0;
                next.w[i] = rhs[i] + r * (right - left);
            }
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (!(next.u[i] >= -ctl.tol_lb))
            throw Error(ErrorKind::PositivityLoss, "u < 0 in cell " + std::to_string(i) + " (dt = " + std::to_string(dt) + ")");
        if (!(spec.g(next.w[i]) > 0.0))
            throw Error(ErrorKind::PositivityLoss,
                        "g(w) <= 0 in cell " + std::to_string(i) + " (dt = " + std::to_string(dt) + ")");
    }
    return next;
}

inline State initial_state(const RegLevel& lv, const ProblemSpec& spec, const Grid1D& grid) {
    return State{0.0, grid.sample(spec.u0), lv.w0_eps};
}

namespace detail {

/// Name of the first extensibility quantity above its ceiling, or empty.
inline std::string detector(const StepRecord& r, const StepControls& ctl) {
    if (!(r.max_u <= ctl.u_ceiling)) return "u_inf";
    const double wnorm = std::max(std::abs(r.min_w), std::abs(r.max_w)) + r.max_abs_wx;
    if (!(wnorm <= ctl.w_ceiling)) return "w_W12";
    if (!(r.max_inv_g <= ctl.inv_g_ceiling)) return "inv_g";
    return {};
}

} // namespace detail

/// Integrates to T, landing exactly on each requested output time.
inline RunResult run(const RegLevel& lv, const ProblemSpec& spec, const DerivedConstants& consts, const Grid1D& grid,
                     double T, const StepControls& ctl, std::vector<double> output_times) {
    RunResult res;
    res.eps = lv.eps;
    res.within_gate = T <= lv.gate(consts.Gamma);
    std::sort(output_times.begin(), output_times.end());
    std::erase_if(output_times, [T](double t) { return t < 0.0 || t > T * (1.0 + 1e-12); });

    State s = initial_state(lv, spec, grid);
    std::size_t next_out = 0;
    const auto take_snapshots = [&](double tol) {
        while (next_out < output_times.size() && output_times[next_out] <= s.t + tol) {
            res.snapshots.push_back({output_times[next_out], s.u, s.w});
            ++next_out;
        }
    };
    const auto fail = [&](const std::string& what) {
        res.status = RunStatus::BlowUpDetected;
        res.failure_time = s.t;
        res.failure_quantity = what;
    };

    try {
        res.series.push_back(diagnose(s, 0.0, lv, spec, grid, consts.M));
        take_snapshots(1e-14);
        if (auto q = detail::detector(res.series.back(), ctl); !q.empty()) {
            fail(q);
            return res;
        }
        const double t_tol = 1e-12 * std::max(1.0, T);
        while (s.t < T - t_tol) {
            double dt = stable_dt(s, lv, spec, consts, grid, ctl);
            double target = T;
            if (next_out < output_times.size()) target = std::min(target, output_times[next_out]);
            if (s.t + dt > target - t_tol) dt = target - s.t;
            s = step(s, dt, lv, spec, grid, ctl);
            if (std::abs(s.t - target) <= t_tol) s.t = target;
            res.series.push_back(diagnose(s, dt, lv, spec, grid, consts.M));
            take_snapshots(t_tol);
            if (auto q = detail::detector(res.series.back(), ctl); !q.empty()) {
                fail(q);
                return res;
            }
        }
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::PositivityLoss && e.kind() != ErrorKind::LinearSolveFailure &&
            e.kind() != ErrorKind::DomainError)
            throw;
        fail(e.what());
    }
    return res;
}

/// n+1 equally spaced output times on [0,T].
inline std::vector<double> uniform_times(double T, std::size_t count) {
    std::vector<double> t(count);
    for (std::size_t k = 0; k < count; ++k) t[k] = count > 1 ? T * static_cast<double>(k) / static_cast<double>(count - 1) : T;
    return t;
}

} // namespace haptosim
