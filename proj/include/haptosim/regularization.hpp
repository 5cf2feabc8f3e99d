#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "haptosim/error.hpp"
#include "haptosim/grid.hpp"
#include "haptosim/model_spec.hpp"

namespace haptosim {

/// e^e: the smallest A for which eta stays in (0, 1/e] for every delta_eps <= 1.
inline const double kDefaultA = std::exp(std::numbers::e);

/// One member of the approximating family.
struct RegLevel {
    double eps = 0.0;
    Field d_eps;                  ///< cell centers
    std::vector<double> d_face;   ///< face averages of d_eps (n+1)
    double delta_eps = 0.0;
    double eta_eps = 0.0;
    Field w0_eps;
    double A = kDefaultA;
    double sigma = 0.0;           ///< mollifier half-width

    /// Horizon (eta/Gamma) ln(1/sqrt(delta_eps)) up to which w stays above delta_eps.
    double gate(double Gamma) const { return eta_eps / Gamma * std::log(1.0 / std::sqrt(delta_eps)); }

    double lower_barrier(double t, double Gamma) const {
        return std::sqrt(delta_eps) * std::exp(-Gamma * t / eta_eps);
    }
};

struct Schedule {
    std::vector<RegLevel> levels;
    double eps0 = 0.0;
};

namespace detail {

inline double reflect_into(double y, double a, double b) {
    for (int k = 0; k < 64 && (y < a || y > b); ++k) y = y < a ? 2.0 * a - y : 2.0 * b - y;
    return y;
}

/// Normalized midpoint weights of the bump exp(-1/(1-t^2)) on (-1,1).
struct BumpRule {
    std::vector<double> t;
    std::vector<double> w;

    explicit BumpRule(std::size_t m) : t(m), w(m) {
        double s = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            t[k] = -1.0 + (static_cast<double>(k) + 0.5) * 2.0 / static_cast<double>(m);
            w[k] = std::exp(-1.0 / (1.0 - t[k] * t[k]));
            s += w[k];
        }
        for (double& v : w) v /= s;
    }
};

/// Mollified, evenly reflected sqrt(d) at x. A convex combination of
/// translates, so its Lipschitz constant never exceeds that of sqrt(d).
inline double smoothed_sqrt_d(const ProblemSpec& spec, const BumpRule& rule, double sigma, double x) {
    double s = 0.0;
    for (std::size_t k = 0; k < rule.t.size(); ++k)
        s += rule.w[k] * std::sqrt(std::max(0.0, spec.d(reflect_into(x + sigma * rule.t[k], spec.a, spec.b))));
    return s;
}

} // namespace detail

struct LevelInvariant {
    std::string name;
    bool pass = false;
    double worst = 0.0;
};

/// d_eps = (S_sigma[sqrt d])^2 + sqrt(eps), sigma = sqrt(eps) (b-a).
/// When K1 > 0 the floor/ceiling and face-ratio bounds are enforced.
inline Field mollify_sqrt_d(const ProblemSpec& spec, double eps, const Grid1D& grid, double K1 = -1.0) {
    if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorKind::InvalidValue, "eps must lie in (0,1)");
    const detail::BumpRule rule(256);
    const double sigma = std::sqrt(eps) * grid.length();
    const double floor = std::sqrt(eps);
    Field d(grid.n());
    for (std::size_t i = 0; i < grid.n(); ++i) {
        const double s = detail::smoothed_sqrt_d(spec, rule, sigma, grid.center(i));
        d[i] = s * s + floor;
    }
    if (K1 > 0.0) {
        double dmax = 0.0;
        for (double x : detail::nodes(spec.a, spec.b, 4 * grid.n())) dmax = std::max(dmax, spec.d(x));
        for (std::size_t i = 0; i < grid.n(); ++i)
            if (d[i] < floor * (1.0 - 1e-12) || d[i] > dmax + 1.0)
                throw Error(ErrorKind::InvariantViolation, "d_eps outside [sqrt(eps), max d + 1] at cell " + std::to_string(i));
        for (std::size_t f = 1; f < grid.n(); ++f) {
            const double dx = (d[f] - d[f - 1]) / grid.h();
            const double ratio = dx * dx / (0.5 * (d[f] + d[f - 1]));
            if (ratio > K1 * (1.0 + 1e-9))
                throw Error(ErrorKind::InvariantViolation,
                            "d_eps,x^2/d_eps = " + std::to_string(ratio) + " exceeds K1 at face " + std::to_string(f));
        }
    }
    return d;
}

/// delta_eps = g^{-1}(eps) by bisection on [0, min(delta^2, M)].
inline double delta_eps(const WFn& g, double eps, double delta, double M) {
    double lo = 0.0, hi = std::min(delta * delta, M);
    if (!(g(hi) > eps)) throw Error(ErrorKind::BracketFailure, "g(min(delta^2,M)) <= eps");
    while (hi - lo > 1e-14) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) < eps) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

inline double eta_eps(double delta_eps, double A = kDefaultA) {
    const double L = std::log(A / std::sqrt(delta_eps));
    return std::log(L) / L;
}

inline std::vector<LevelInvariant> level_invariants(const RegLevel& lv, const ProblemSpec& spec,
                                                    const DerivedConstants& consts, const Grid1D& grid) {
    std::vector<LevelInvariant> out;
    double dmax = 0.0;
    for (double x : detail::nodes(spec.a, spec.b, 4 * grid.n())) dmax = std::max(dmax, spec.d(x));
    const double floor = std::sqrt(lv.eps);
    {
        double worst = HUGE_VAL;
        for (double v : lv.d_eps) worst = std::min({worst, v - floor, dmax + 1.0 - v});
        out.push_back({"d_eps_bounds", worst >= -1e-12 * floor, worst});
    }
    {
        double worst = HUGE_VAL;
        for (std::size_t f = 1; f < grid.n(); ++f) {
            const double dx = (lv.d_eps[f] - lv.d_eps[f - 1]) / grid.h();
            worst = std::min(worst, consts.K1 * (1.0 + 1e-9) - dx * dx / lv.d_face[f]);
        }
        out.push_back({"d_eps_gradient_ratio", worst >= 0.0, worst});
    }
    {
        double worst = HUGE_VAL;
        for (double w : detail::nodes(lv.delta_eps, consts.M, 4 * grid.n())) worst = std::min(worst, spec.g(w) - lv.eps);
        out.push_back({"g_above_eps", worst >= -1e-9 * lv.eps, worst});
    }
    {
        const double worst = std::min(lv.delta_eps, spec.delta * spec.delta - lv.delta_eps);
        out.push_back({"delta_eps_range", worst > 0.0, worst});
    }
    {
        const double L = std::log(lv.A / std::sqrt(lv.delta_eps));
        const double formula = std::log(L) / L;
        const bool ok = std::abs(formula - lv.eta_eps) <= 1e-15 && lv.eta_eps > 0.0 &&
                        lv.eta_eps <= 1.0 / std::numbers::e + 1e-15;
        out.push_back({"eta_eps_formula", ok, 1.0 / std::numbers::e - lv.eta_eps});
    }
    return out;
}

inline RegLevel build_level(const ProblemSpec& spec, const DerivedConstants& consts, const Grid1D& grid, double eps,
                            double A = kDefaultA) {
    if (!(eps > 0.0 && eps < consts.eps0))
        throw Error(ErrorKind::InvalidValue, "eps = " + std::to_string(eps) + " not in (0, eps0)");
    if (A < kDefaultA * (1.0 - 1e-15)) throw Error(ErrorKind::InvalidValue, "A must be at least e^e");
    RegLevel lv;
    lv.eps = eps;
    lv.A = A;
    lv.sigma = std::sqrt(eps) * grid.length();
    lv.d_eps = mollify_sqrt_d(spec, eps, grid, consts.K1);
    lv.d_face = face_average(lv.d_eps);
    lv.delta_eps = haptosim::delta_eps(spec.g, eps, spec.delta, consts.M);
    lv.eta_eps = haptosim::eta_eps(lv.delta_eps, A);
    const double lift = std::sqrt(lv.delta_eps);
    lv.w0_eps = grid.sample([&](double x) { return spec.w0(x) + lift; });
    for (const auto& inv : level_invariants(lv, spec, consts, grid))
        if (!inv.pass)
            throw Error(ErrorKind::InvariantViolation, inv.name + " fails (worst " + std::to_string(inv.worst) + ")");
    return lv;
}

inline Schedule build_schedule(const ProblemSpec& spec, const DerivedConstants& consts, const Grid1D& grid,
                               std::span<const double> eps_list, double A = kDefaultA) {
    Schedule s;
    s.eps0 = consts.eps0;
    for (std::size_t k = 0; k < eps_list.size(); ++k) {
        if (k > 0 && !(eps_list[k] < eps_list[k - 1]))
            throw Error(ErrorKind::InvalidValue, "level " + std::to_string(k) + ": eps_list must strictly decrease");
        try {
            s.levels.push_back(build_level(spec, consts, grid, eps_list[k], A));
        } catch (const Error& e) {
            throw Error(e.kind(), "level " + std::to_string(k) + ": " + e.detail());
        }
    }
    for (std::size_t k = 1; k < s.levels.size(); ++k) {
        const auto& p = s.levels[k - 1];
        const auto& c = s.levels[k];
        if (!(c.delta_eps < p.delta_eps))
            throw Error(ErrorKind::InvariantViolation, "delta_eps not strictly decreasing at level " + std::to_string(k));
        if (!(c.eta_eps * std::log(1.0 / std::sqrt(c.delta_eps)) > p.eta_eps * std::log(1.0 / std::sqrt(p.delta_eps))))
            throw Error(ErrorKind::InvariantViolation,
                        "eta ln(1/sqrt(delta)) not strictly increasing at level " + std::to_string(k));
    }
    return s;
}

struct GateSelection {
    std::vector<std::size_t> indices;
    std::vector<RegLevel> levels;
    std::string warning; ///< Nonempty (EmptySelection) when no level qualifies.
};

/// Keeps exactly the levels with T <= (eta/Gamma) ln(1/sqrt(delta_eps)).
inline GateSelection epsilon_star(double T, const Schedule& schedule, double Gamma) {
    if (!(T > 0.0)) throw Error(ErrorKind::InvalidValue, "T must be positive");
    GateSelection sel;
    for (std::size_t k = 0; k < schedule.levels.size(); ++k) {
        if (T <= schedule.levels[k].gate(Gamma)) {
            sel.indices.push_back(k);
            sel.levels.push_back(schedule.levels[k]);
        }
    }
    if (sel.levels.empty())
        sel.warning = "EmptySelection: no level is valid up to T = " + std::to_string(T) + "; extend eps_list downward";
    return sel;
}

} // namespace haptosim
