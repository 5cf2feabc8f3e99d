#pragma once

// Monitors for the a priori bounds, with every constant written out.
//
// Upper bounds carry margin = bound - observed, lower bounds
// margin = observed - bound; a check passes iff its margin is >= 0.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "haptosim/format.hpp"
#include "haptosim/functionals.hpp"
#include "haptosim/grid.hpp"
#include "haptosim/model_spec.hpp"
#include "haptosim/pde_solver.hpp"
#include "haptosim/regularization.hpp"

namespace haptosim {

struct EstimateCheck {
    std::string name;
    double bound = 0.0;
    double observed = 0.0;
    double margin = 0.0;
    bool pass = false;
};

struct EstimateReport {
    std::vector<EstimateCheck> checks;

    bool all_pass() const {
        return std::all_of(checks.begin(), checks.end(), [](const EstimateCheck& c) { return c.pass; });
    }

    const EstimateCheck* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }

    std::string to_csv() const {
        std::string out = "check,bound,observed,margin,pass\n";
        for (const auto& c : checks)
            out += c.name + "," + fmt17(c.bound) + "," + fmt17(c.observed) + "," + fmt17(c.margin) + "," +
                   (c.pass ? "1" : "0") + "\n";
        return out;
    }

    std::string to_text() const {
        std::ostringstream os;
        for (const auto& c : checks) {
            os << (c.pass ? "  ok    " : "  FAIL  ") << c.name;
            for (std::size_t k = c.name.size(); k < 26; ++k) os << ' ';
            os << "observed " << fmt17(c.observed) << "  bound " << fmt17(c.bound) << "\n";
        }
        return os.str();
    }
};

/// Constants of the entropy argument, plus the derived caps for the weighted norms.
struct EntropyConstants {
    double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0, c5 = 0.0, c6 = 0.0, c7 = 0.0;
    double mass_cap = 0.0;       ///< (int u0) e^{rho(M) T}
    double sqrt_d_cap = 0.0;     ///< sqrt(||d||_inf + 1)
    double w_grad_cap = 0.0;
    double taxis_energy_cap = 0.0;
    double l1_grad_sq_cap = 0.0;
    double linf_sq_cap = 0.0;
    double l3_cap = 0.0;
};

namespace detail {

inline double midpoint(const XFn& fn, double a, double b, std::size_t n) {
    const double h = (b - a) / static_cast<double>(n);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += fn(a + (static_cast<double>(i) + 0.5) * h);
    return h * s;
}

/// max f_- over the box [a,b] x [0,u_hi] x [0,M] on an m^3 lattice.
inline double max_f_minus(const ProblemSpec& spec, double u_hi, double M, std::size_t m) {
    double best = 0.0;
    const auto xs = nodes(spec.a, spec.b, m - 1);
    const auto us = nodes(0.0, u_hi, m - 1);
    const auto ws = nodes(0.0, M, m - 1);
    for (double x : xs)
        for (double u : us)
            for (double w : ws) best = std::max(best, spec.f_minus(x, u, w));
    return best;
}

inline double trapezoid(const std::vector<StepRecord>& s, double StepRecord::*field) {
    double acc = 0.0;
    for (std::size_t k = 1; k < s.size(); ++k) acc += 0.5 * (s[k].*field + s[k - 1].*field) * (s[k].t - s[k - 1].t);
    return acc;
}

} // namespace detail

/// c6 uses the supremum over the family of int w0x^2/g(w0 + shift), which for
/// nondecreasing g is attained as the shift tends to 0.
inline EntropyConstants constants_c(const ProblemSpec& spec, const DerivedConstants& consts, double T,
                                    std::size_t n_quad = 4000) {
    EntropyConstants c;
    const double L = spec.length();
    const double rho = consts.rhoM;
    const double mass0 = detail::midpoint(spec.u0, spec.a, spec.b, n_quad);
    const double ent0 = detail::midpoint([&](double x) { return xlogx(spec.u0(x)); }, spec.a, spec.b, n_quad);
    const double dmax = detail::sup_on_interval(spec.d, spec.a, spec.b, n_quad);
    const double wgrad0 = initial_weighted_gradient(spec, 0.0, n_quad);

    c.c1 = (rho + consts.K1 / 2.0) * mass0 * std::exp(rho * T);
    c.c2 = detail::max_f_minus(spec, 1.0, consts.M, 101);
    c.c3 = L / std::numbers::e * (c.c2 + rho);
    c.c4 = c.c1 + c.c3 + consts.K1 * L / std::numbers::e;
    c.c5 = rho + consts.K1;
    const double ratio = c.c5 > 0.0 ? c.c4 / c.c5 : c.c4 * T;
    c.c6 = (ent0 + 0.5 * (dmax + 1.0) * wgrad0 + ratio) * std::exp(c.c5 * T);
    c.c7 = c.c6 + L / std::numbers::e + c.c4 * T + c.c5 * c.c6 * T;

    const double m = mass0 * std::exp(rho * T);
    c.mass_cap = m;
    c.sqrt_d_cap = std::sqrt(dmax + 1.0);
    // 1/2 int d w_x^2/g(w) <= y - int u ln u <= c6 + |Omega|/e and g(w) <= g(M)
    c.w_grad_cap = 2.0 * consts.gM * (c.c6 + L / std::numbers::e);
    // the taxis part of h carries g'/g >= gamma
    c.taxis_energy_cap = 2.0 * c.c7 / consts.gamma_low;
    // |(sqrt(d) u)_x| <= sqrt(d)|u_x| + sqrt(K1)/2 u, then (a+b)^2 <= 2a^2 + 2b^2 and Cauchy-Schwarz
    c.l1_grad_sq_cap = 2.0 * m * (2.0 * c.c7) + 0.5 * consts.K1 * m * m * T;
    // ||v||_inf <= ||v||_1/|Omega| + ||v_x||_1
    const double v1 = c.sqrt_d_cap * m;
    c.linf_sq_cap = 2.0 * c.l1_grad_sq_cap + 2.0 * (v1 / L) * (v1 / L) * T;
    // int v^3 <= ||v||_inf^2 ||v||_1
    c.l3_cap = v1 * c.linf_sq_cap;
    return c;
}

struct KappaResult {
    double value = std::numeric_limits<double>::infinity();
    std::string warning; ///< "ScanTooCoarse: ..." when the hit sits on the scan boundary
};

/// kappa(N) = inf { u : u f_-(x,u,w) >= N for some (x,w) in [a,b] x [0,M] }.
inline KappaResult kappa_of_N(const ProblemSpec& spec, double M, double N, double u_max_scan, std::size_t n_scan = 101) {
    if (!(N > 0.0)) throw Error(ErrorKind::InvalidValue, "kappa_of_N needs N > 0");
    if (!(u_max_scan > 0.0) || n_scan < 3) throw Error(ErrorKind::InvalidValue, "kappa_of_N needs a nondegenerate scan");
    const auto xs = detail::nodes(spec.a, spec.b, n_scan - 1);
    const auto ws = detail::nodes(0.0, M, n_scan - 1);
    const auto phi = [&](double u) {
        double best = 0.0;
        for (double x : xs)
            for (double w : ws) best = std::max(best, u * spec.f_minus(x, u, w));
        return best;
    };
    const std::size_t nu = 10 * (n_scan - 1);
    KappaResult r;
    double prev = 0.0;
    for (std::size_t k = 0; k <= nu; ++k) {
        const double u = u_max_scan * static_cast<double>(k) / static_cast<double>(nu);
        if (phi(u) >= N) {
            if (k == 0) {
                r.value = 0.0;
                return r;
            }
            double lo = prev, hi = u;
            while (hi - lo > 1e-12 * std::max(1.0, hi)) {
                const double mid = 0.5 * (lo + hi);
                if (phi(mid) >= N) hi = mid;
                else lo = mid;
            }
            r.value = hi;
            if (k == nu) r.warning = "ScanTooCoarse: kappa sits at the scan boundary u = " + fmt17(u_max_scan);
            return r;
        }
        prev = u;
    }
    return r;
}

struct TailRow {
    double N = 0.0;
    double kappa = 0.0;
    double superlevel_measure = 0.0; ///< |{u >= kappa(N)}| in space-time
    double reaction_tail = 0.0;      ///< int int_{u >= kappa(N)} u f_-
    double absorption_tail = 0.0;    ///< int int_{u >= N} u g(w)
};

/// Space-time tails over the stored snapshots (trapezoid in t).
inline std::vector<TailRow> equiintegrability_profile(const RunResult& run, const ProblemSpec& spec,
                                                      const DerivedConstants& consts, const Grid1D& grid,
                                                      std::span<const double> thresholds, double u_max_scan) {
    std::vector<TailRow> rows;
    for (double N : thresholds) {
        TailRow row;
        row.N = N;
        row.kappa = kappa_of_N(spec, consts.M, N, u_max_scan).value;
        std::vector<double> meas, react, absorb;
        for (const auto& s : run.snapshots) {
            double m = 0.0, r = 0.0, a = 0.0;
            for (std::size_t i = 0; i < grid.n(); ++i) {
                const double u = s.u[i];
                if (u >= row.kappa) {
                    m += 1.0;
                    r += u * spec.f_minus(grid.center(i), u, s.w[i]);
                }
                if (u >= N) a += u * spec.g(s.w[i]);
            }
            meas.push_back(grid.h() * m);
            react.push_back(grid.h() * r);
            absorb.push_back(grid.h() * a);
        }
        for (std::size_t k = 1; k < run.snapshots.size(); ++k) {
            const double dt = run.snapshots[k].t - run.snapshots[k - 1].t;
            row.superlevel_measure += 0.5 * dt * (meas[k] + meas[k - 1]);
            row.reaction_tail += 0.5 * dt * (react[k] + react[k - 1]);
            row.absorption_tail += 0.5 * dt * (absorb[k] + absorb[k - 1]);
        }
        rows.push_back(row);
    }
    return rows;
}

struct AuditOptions {
    double mass_tol = 1e-10;
    std::vector<double> kappa_thresholds{1.0, 2.0, 4.0, 8.0};
    std::vector<double> tail_thresholds{1.0, 10.0, 100.0};
    std::size_t geometry_samples = 2000;
};

inline EstimateReport audit_run(const RunResult& run, const RegLevel& lv, const ProblemSpec& spec,
                                const DerivedConstants& consts, const Grid1D& grid, double T,
                                const StepControls& ctl = {}, const AuditOptions& opt = {}) {
    EstimateReport rep;
    const auto upper = [&](const std::string& name, double bound, double observed) {
        const double margin = bound - observed;
        rep.checks.push_back({name, bound, observed, margin, margin >= 0.0});
    };
    const auto lower = [&](const std::string& name, double bound, double observed) {
        const double margin = observed - bound;
        rep.checks.push_back({name, bound, observed, margin, margin >= 0.0});
    };
    const auto c = constants_c(spec, consts, T);
    const auto& series = run.series;

    {
        const double m0 = integrate(grid.sample(spec.u0), grid);
        double worst = 0.0;
        const auto visit = [&](double t, double mass) { worst = std::max(worst, mass / (m0 * std::exp(consts.rhoM * t))); };
        for (const auto& r : series) visit(r.t, r.mass);
        for (const auto& s : run.snapshots) visit(s.t, integrate(s.u, grid));
        upper("mass_growth", 1.0 + opt.mass_tol, worst);
    }
    {
        double wmax = -HUGE_VAL, gap = HUGE_VAL;
        const double gate = lv.gate(consts.Gamma);
        const auto visit = [&](double t, double lo, double hi) {
            wmax = std::max(wmax, hi);
            if (t <= gate) gap = std::min(gap, lo - lv.lower_barrier(t, consts.Gamma));
        };
        for (const auto& r : series) visit(r.t, r.min_w, r.max_w);
        for (const auto& s : run.snapshots)
            visit(s.t, *std::min_element(s.w.begin(), s.w.end()), *std::max_element(s.w.begin(), s.w.end()));
        upper("w_upper", consts.M + ctl.tol_ub, wmax);
        lower("w_lower", -ctl.tol_lb, gap);
    }
    {
        double ymax = -HUGE_VAL, wg = 0.0;
        for (const auto& r : series) {
            ymax = std::max(ymax, r.y);
            wg = std::max(wg, r.w_grad);
        }
        upper("entropy_bound", c.c6, ymax);
        upper("dissipation_budget", c.c7, detail::trapezoid(series, &StepRecord::h));
        upper("weighted_w_grad", c.w_grad_cap, wg);
        upper("weighted_taxis_energy", c.taxis_energy_cap, detail::trapezoid(series, &StepRecord::taxis_energy));
        upper("l1_grad_sq", c.l1_grad_sq_cap, detail::trapezoid(series, &StepRecord::l1_grad_sq));
        upper("linf_sq", c.linf_sq_cap, detail::trapezoid(series, &StepRecord::linf_sq));
        upper("l3_weighted", c.l3_cap, detail::trapezoid(series, &StepRecord::l3));
    }
    {
        double umax = 0.0;
        for (const auto& r : series) umax = std::max(umax, r.max_u);
        const double scan = std::max(10.0, 10.0 * umax);
        // smallest step between consecutive kappas; infinite pairs count as 0
        double worst = HUGE_VAL;
        double prev = -HUGE_VAL;
        for (double N : opt.kappa_thresholds) {
            const double k = kappa_of_N(spec, consts.M, N, scan).value;
            if (prev > -HUGE_VAL) worst = std::min(worst, (std::isinf(k) && std::isinf(prev)) ? 0.0 : k - prev);
            prev = k;
        }
        lower("kappa_table", 0.0, worst == HUGE_VAL ? 0.0 : worst);

        const auto rows = equiintegrability_profile(run, spec, consts, grid, opt.tail_thresholds, scan);
        double inc = 0.0;
        for (std::size_t k = 1; k < rows.size(); ++k) {
            inc = std::max(inc, rows[k].reaction_tail - rows[k - 1].reaction_tail);
            inc = std::max(inc, rows[k].absorption_tail - rows[k - 1].absorption_tail);
            inc = std::max(inc, rows[k].superlevel_measure - rows[k - 1].superlevel_measure);
        }
        upper("equiintegrability_table", 0.0, inc);
    }
    {
        const auto xs = detail::nodes(spec.a, spec.b, opt.geometry_samples);
        std::vector<double> ds(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) ds[i] = spec.d(xs[i]);
        const auto geo = check_degeneracy_geometry(xs, ds, consts.K1);
        upper("dist_sq_geometry", 1.0 + 1e-6, geo.ratio);
    }
    return rep;
}

} // namespace haptosim
