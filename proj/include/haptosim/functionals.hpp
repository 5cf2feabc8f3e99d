#pragma once

// Discrete versions of the entropy y, the dissipation h and the weighted
// norms that the a priori estimates control. Gradients live on interior
// faces; boundary faces carry zero gradient (no-flux closure).

#include <algorithm>
#include <cmath>

#include "haptosim/error.hpp"
#include "haptosim/grid.hpp"
#include "haptosim/model_spec.hpp"
#include "haptosim/regularization.hpp"

namespace haptosim {

struct State {
    double t = 0.0;
    Field u;
    Field w;
};

inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

inline double entropy_y(const State& s, const RegLevel& lv, const ProblemSpec& spec, const Grid1D& grid) {
    const std::size_t n = grid.n();
    const double h = grid.h();
    double ent = 0.0;
    for (double u : s.u) ent += xlogx(u);
    double grad = 0.0;
    for (std::size_t f = 1; f < n; ++f) {
        const double wx = (s.w[f] - s.w[f - 1]) / h;
        const double gw = spec.g(0.5 * (s.w[f] + s.w[f - 1]));
        if (!(gw > 0.0)) throw Error(ErrorKind::DomainError, "g(w) <= 0 at face " + std::to_string(f));
        grad += lv.d_face[f] * wx * wx / gw;
    }
    return h * ent + 0.5 * h * grad;
}

/// Taxis-upwind cell for face f (left when w increases across the face).
inline std::size_t upwind_cell(const State& s, std::size_t f) { return s.w[f] - s.w[f - 1] >= 0.0 ? f - 1 : f; }

struct DissipationParts {
    double fisher = 0.0;   ///< int d u_x^2 / u
    double taxis = 0.0;    ///< int d u/(1+eta u) g'/g w_x^2
    double reaction = 0.0; ///< int_{u>=1} u ln u f_-

    double total() const { return 0.5 * fisher + 0.5 * taxis + reaction; }
};

inline DissipationParts dissipation_parts(const State& s, const RegLevel& lv, const ProblemSpec& spec,
                                          const Grid1D& grid, double M) {
    const std::size_t n = grid.n();
    const double h = grid.h();
    DissipationParts p;
    for (std::size_t f = 1; f < n; ++f) {
        const double ux = (s.u[f] - s.u[f - 1]) / h;
        const double wx = (s.w[f] - s.w[f - 1]) / h;
        const double uup = s.u[upwind_cell(s, f)];
        if (uup >= 1e-300) p.fisher += lv.d_face[f] * ux * ux / uup;
        const double ub = 0.5 * (s.u[f] + s.u[f - 1]);
        const double wb = 0.5 * (s.w[f] + s.w[f - 1]);
        const double gw = spec.g(wb);
        if (!(gw > 0.0)) throw Error(ErrorKind::DomainError, "g(w) <= 0 at face " + std::to_string(f));
        p.taxis += lv.d_face[f] * (ub / (1.0 + lv.eta_eps * ub)) * (spec.g_derivative(wb, M) / gw) * wx * wx;
    }
    for (std::size_t i = 0; i < n; ++i)
        if (s.u[i] >= 1.0) p.reaction += xlogx(s.u[i]) * spec.f_minus(grid.center(i), s.u[i], s.w[i]);
    p.fisher *= h;
    p.taxis *= h;
    p.reaction *= h;
    return p;
}

inline double dissipation_h(const State& s, const RegLevel& lv, const ProblemSpec& spec, const Grid1D& grid, double M) {
    return dissipation_parts(s, lv, spec, grid, M).total();
}

/// Per-step scalar diagnostics.
struct StepRecord {
    double t = 0.0;
    double dt = 0.0;
    double mass = 0.0;
    double min_u = 0.0;
    double max_u = 0.0;
    double min_w = 0.0;
    double max_w = 0.0;
    double y = 0.0;
    double h = 0.0;
    // not serialized to the series CSV
    double fisher = 0.0;        ///< int d u_x^2/u
    double w_grad = 0.0;        ///< int d w_x^2
    double taxis_energy = 0.0;  ///< int d u/(1+eta u) w_x^2
    double l1_grad_sq = 0.0;    ///< ||(sqrt(d) u)_x||_{L1}^2
    double linf_sq = 0.0;       ///< ||sqrt(d) u||_inf^2
    double l3 = 0.0;            ///< int d^{3/2} u^3
    double reaction_mass = 0.0; ///< int u f
    double max_abs_wx = 0.0;
    double max_inv_g = 0.0;
};

inline StepRecord diagnose(const State& s, double dt, const RegLevel& lv, const ProblemSpec& spec, const Grid1D& grid,
                           double M) {
    const std::size_t n = grid.n();
    const double h = grid.h();
    StepRecord r;
    r.t = s.t;
    r.dt = dt;
    r.mass = integrate(s.u, grid);
    r.min_u = *std::min_element(s.u.begin(), s.u.end());
    r.max_u = *std::max_element(s.u.begin(), s.u.end());
    r.min_w = *std::min_element(s.w.begin(), s.w.end());
    r.max_w = *std::max_element(s.w.begin(), s.w.end());
    r.y = entropy_y(s, lv, spec, grid);
    const auto parts = dissipation_parts(s, lv, spec, grid, M);
    r.h = parts.total();
    r.fisher = parts.fisher;

    double l1 = 0.0, linf = 0.0, l3 = 0.0, react = 0.0, wg = 0.0, te = 0.0, maxwx = 0.0, maxinvg = 0.0;
    double prev = std::sqrt(lv.d_eps[0]) * s.u[0];
    for (std::size_t i = 0; i < n; ++i) {
        const double sq = std::sqrt(lv.d_eps[i]) * s.u[i];
        if (i > 0) l1 += std::abs(sq - prev);
        prev = sq;
        linf = std::max(linf, std::abs(sq));
        l3 += lv.d_eps[i] * std::sqrt(lv.d_eps[i]) * s.u[i] * s.u[i] * s.u[i];
        react += s.u[i] * spec.f(grid.center(i), s.u[i], s.w[i]);
        maxinvg = std::max(maxinvg, 1.0 / spec.g(s.w[i]));
    }
    for (std::size_t f = 1; f < n; ++f) {
        const double wx = (s.w[f] - s.w[f - 1]) / h;
        const double ub = 0.5 * (s.u[f] + s.u[f - 1]);
        wg += lv.d_face[f] * wx * wx;
        te += lv.d_face[f] * ub / (1.0 + lv.eta_eps * ub) * wx * wx;
        maxwx = std::max(maxwx, std::abs(wx));
    }
    r.l1_grad_sq = l1 * l1;
    r.linf_sq = linf * linf;
    r.l3 = h * l3;
    r.reaction_mass = h * react;
    r.w_grad = h * wg;
    r.taxis_energy = h * te;
    r.max_abs_wx = maxwx;
    r.max_inv_g = maxinvg;
    return r;
}

} // namespace haptosim
