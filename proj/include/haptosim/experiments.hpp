#pragma once

// Epsilon sweeps and the checks run on top of them: Cauchy distances away
// from the degeneracy set, the limit-ODE oracle inside it, and the weak
// identities on the finest level.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "haptosim/error.hpp"
#include "haptosim/estimates.hpp"
#include "haptosim/grid.hpp"
#include "haptosim/limit_ode.hpp"
#include "haptosim/model_spec.hpp"
#include "haptosim/pde_solver.hpp"
#include "haptosim/regularization.hpp"

namespace haptosim {

/// Worker count: hardware concurrency, capped by HAPTOSIM_THREADS and by the job count.
inline std::size_t worker_count(std::size_t jobs) {
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("HAPTOSIM_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap > 0) n = std::min(n, static_cast<std::size_t>(cap));
    }
    return std::max<std::size_t>(1, std::min(n, jobs));
}

/// Runs fn(k) for k in [0, jobs) on a small thread pool; the first exception is rethrown.
template <class Fn>
void parallel_for(std::size_t jobs, Fn&& fn) {
    const std::size_t workers = worker_count(jobs);
    if (workers <= 1) {
        for (std::size_t k = 0; k < jobs; ++k) fn(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t)
        pool.emplace_back([&] {
            for (std::size_t k; (k = next.fetch_add(1)) < jobs;) {
                try {
                    fn(k);
                } catch (...) {
                    std::lock_guard lock(mu);
                    if (!first) first = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (first) std::rethrow_exception(first);
}

struct SweepResult {
    std::vector<RegLevel> levels;
    std::vector<RunResult> runs;
    std::vector<EstimateReport> reports;
    std::size_t candidate = 0; ///< index of the finest level

    const RunResult& candidate_run() const { return runs.at(candidate); }
};

inline SweepResult run_sweep(const ProblemSpec& spec, const DerivedConstants& consts, const Grid1D& grid,
                             const std::vector<RegLevel>& levels, double T, const StepControls& ctl,
                             const std::vector<double>& output_times) {
    if (levels.empty()) throw Error(ErrorKind::EmptySchedule, "sweep needs at least one level");
    SweepResult sw;
    sw.levels = levels;
    sw.runs.resize(levels.size());
    sw.reports.resize(levels.size());
    parallel_for(levels.size(), [&](std::size_t k) {
        try {
            sw.runs[k] = run(levels[k], spec, consts, grid, T, ctl, output_times);
            sw.reports[k] = audit_run(sw.runs[k], levels[k], spec, consts, grid, T, ctl);
        } catch (const Error& e) {
            throw Error(e.kind(), "level " + std::to_string(k) + " (eps = " + eps_tag(levels[k].eps) + "): " + e.detail());
        }
    });
    for (std::size_t k = 1; k < levels.size(); ++k)
        if (levels[k].eps < levels[sw.candidate].eps) sw.candidate = k;
    return sw;
}

struct CauchyTable {
    std::vector<double> du; ///< du[k] = ||u_{k+1} - u_k||_{L1(region x (0,T))}
    std::vector<double> dw;
    std::size_t region_cells = 0;
    std::string warning;
};

namespace detail {

inline double spacetime_l1(const RunResult& a, const RunResult& b, const Grid1D& grid, const std::vector<bool>& region,
                           bool use_u) {
    const std::size_t ns = std::min(a.snapshots.size(), b.snapshots.size());
    std::vector<double> slice(ns, 0.0);
    for (std::size_t k = 0; k < ns; ++k) {
        const auto& fa = use_u ? a.snapshots[k].u : a.snapshots[k].w;
        const auto& fb = use_u ? b.snapshots[k].u : b.snapshots[k].w;
        for (std::size_t i = 0; i < grid.n(); ++i)
            if (region[i]) slice[k] += std::abs(fa[i] - fb[i]);
        slice[k] *= grid.h();
    }
    double acc = 0.0;
    for (std::size_t k = 1; k < ns; ++k) acc += 0.5 * (slice[k] + slice[k - 1]) * (a.snapshots[k].t - a.snapshots[k - 1].t);
    return acc;
}

} // namespace detail

/// Distances between consecutive levels on the cells where d > d_floor.
inline CauchyTable cauchy_table(const SweepResult& sw, const ProblemSpec& spec, const Grid1D& grid, double d_floor) {
    CauchyTable tab;
    std::vector<bool> region(grid.n());
    for (std::size_t i = 0; i < grid.n(); ++i) {
        region[i] = spec.d(grid.center(i)) > d_floor;
        tab.region_cells += region[i] ? 1 : 0;
    }
    if (tab.region_cells == 0) tab.warning = "EmptyRegion: no cell has d > " + fmt17(d_floor);
    for (std::size_t k = 0; k + 1 < sw.runs.size(); ++k) {
        tab.du.push_back(detail::spacetime_l1(sw.runs[k + 1], sw.runs[k], grid, region, true));
        tab.dw.push_back(detail::spacetime_l1(sw.runs[k + 1], sw.runs[k], grid, region, false));
    }
    return tab;
}

struct OdeComparison {
    double eps = 0.0;
    double sup_u = 0.0;       ///< over interior zero cells and all snapshots
    double sup_w = 0.0;
    double final_u = 0.0;     ///< at the last snapshot only
    double final_w = 0.0;
};

/// PDE values on interior zero cells against the pointwise limit ODE
/// started from (u0, w0_eps) of each level.
inline std::vector<OdeComparison> compare_limit_ode(const SweepResult& sw, const ProblemSpec& spec,
                                                    const DerivedConstants& consts, const Grid1D& grid,
                                                    const DegeneracyMask& mask) {
    if (mask.count_interior() == 0) throw Error(ErrorKind::NoDegeneracy, "no interior zero cells to compare on");
    std::vector<OdeComparison> out;
    for (std::size_t k = 0; k < sw.runs.size(); ++k) {
        const auto& r = sw.runs[k];
        OdeComparison cmp;
        cmp.eps = sw.levels[k].eps;
        if (r.snapshots.empty()) {
            out.push_back(cmp);
            continue;
        }
        const double T = r.snapshots.back().t;
        const auto field = solve_limit_field(mask, spec, consts, grid, T, default_ode_dt(T), &sw.levels[k].w0_eps);
        for (std::size_t j = 0; j < field.cells.size(); ++j) {
            const std::size_t i = field.cells[j];
            if (!mask.interior_zero_cells[i]) continue;
            for (std::size_t s = 0; s < r.snapshots.size(); ++s) {
                const auto [uh, wh] = field.trajectories[j].at(r.snapshots[s].t);
                const double eu = std::abs(r.snapshots[s].u[i] - uh);
                const double ew = std::abs(r.snapshots[s].w[i] - wh);
                cmp.sup_u = std::max(cmp.sup_u, eu);
                cmp.sup_w = std::max(cmp.sup_w, ew);
                if (s + 1 == r.snapshots.size()) {
                    cmp.final_u = std::max(cmp.final_u, eu);
                    cmp.final_w = std::max(cmp.final_w, ew);
                }
            }
        }
        out.push_back(cmp);
    }
    return out;
}

/// phi(x,t) = X(x) Theta(t) with analytic derivatives.
struct TestFunction {
    int x_mode = 0; ///< X = cos(x_mode pi xhat)
    int t_kind = 0; ///< 0: sin^2(pi t/T), 1: (1 + cos(pi t/T))/2

    std::string label() const {
        return "X" + std::to_string(x_mode) + (t_kind == 0 ? "_bump" : "_decay");
    }
};

inline std::vector<TestFunction> default_battery(std::size_t size) {
    std::vector<TestFunction> b;
    for (int t = 0; t < 2; ++t)
        for (int m = 0; m < 3; ++m) b.push_back({m, t});
    if (size < b.size()) b.resize(size);
    return b;
}

struct ResidualRow {
    std::string label;
    double w3 = 0.0;
    double w4 = 0.0;
};

struct WeakResidualReport {
    std::vector<ResidualRow> rows;
    double max_w3 = 0.0;
    double max_w4 = 0.0;
};

namespace detail {

struct PhiSample {
    double X, Xx, Xxx;
};

inline PhiSample eval_x(const TestFunction& tf, double x, double a, double b) {
    const double k = tf.x_mode * std::numbers::pi / (b - a);
    const double s = k * (x - a);
    return {std::cos(s), -k * std::sin(s), -k * k * std::cos(s)};
}

inline std::pair<double, double> eval_t(const TestFunction& tf, double t, double T) {
    const double c = std::numbers::pi / T;
    if (tf.t_kind == 0) return {std::sin(c * t) * std::sin(c * t), c * std::sin(2.0 * c * t)};
    return {0.5 * (1.0 + std::cos(c * t)), -0.5 * c * std::sin(c * t)};
}

/// Cell-centered w_x on {d > 0}; one-sided where a neighbour is degenerate or missing.
inline Field positive_side_gradient(const Field& w, const std::vector<bool>& positive, double h) {
    const std::size_t n = w.size();
    Field wx(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!positive[i]) continue;
        const bool l = i > 0 && positive[i - 1];
        const bool r = i + 1 < n && positive[i + 1];
        if (l && r) wx[i] = (w[i + 1] - w[i - 1]) / (2.0 * h);
        else if (r) wx[i] = (w[i + 1] - w[i]) / h;
        else if (l) wx[i] = (w[i] - w[i - 1]) / h;
    }
    return wx;
}

} // namespace detail

/// |LHS - RHS| of both weak identities, normalized by the summed L1 norms of
/// the integrands; true d and true initial data, trapezoid in t over the snapshots.
inline WeakResidualReport weak_residual(const RunResult& cand, const ProblemSpec& spec, const Grid1D& grid,
                                        std::size_t battery_size) {
    WeakResidualReport rep;
    if (cand.snapshots.size() < 2) throw Error(ErrorKind::InvalidValue, "weak residual needs at least two snapshots");
    const std::size_t n = grid.n();
    const double h = grid.h();
    const double T = cand.snapshots.back().t;
    std::vector<double> d(n);
    std::vector<bool> positive(n);
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = spec.d(grid.center(i));
        positive[i] = d[i] > 0.0;
    }
    std::vector<Field> wx;
    for (const auto& s : cand.snapshots) wx.push_back(detail::positive_side_gradient(s.w, positive, h));

    for (const auto& tf : default_battery(battery_size)) {
        std::vector<detail::PhiSample> X(n);
        for (std::size_t i = 0; i < n; ++i) X[i] = detail::eval_x(tf, grid.center(i), spec.a, spec.b);
        // per snapshot: u phi_t, d u phi_xx, d u w_x phi_x, u f phi, w phi_t, u g(w) phi,
        // each as a signed integral and as the integral of its absolute value
        const std::size_t ns = cand.snapshots.size();
        std::vector<std::array<double, 12>> slice(ns);
        for (std::size_t k = 0; k < ns; ++k) {
            const auto& s = cand.snapshots[k];
            const auto [th, tht] = detail::eval_t(tf, s.t, T);
            std::array<double, 12> acc{};
            const auto add = [&acc](std::size_t q, double v) {
                acc[q] += v;
                acc[q + 6] += std::abs(v);
            };
            for (std::size_t i = 0; i < n; ++i) {
                const double x = grid.center(i);
                const double u = s.u[i], w = s.w[i];
                add(0, u * X[i].X * tht);
                if (positive[i]) {
                    add(1, d[i] * u * X[i].Xxx * th);
                    add(2, d[i] * u * wx[k][i] * X[i].Xx * th);
                }
                add(3, u * spec.f(x, u, w) * X[i].X * th);
                add(4, w * X[i].X * tht);
                add(5, u * spec.g(w) * X[i].X * th);
            }
            for (double& v : acc) v *= h;
            slice[k] = acc;
        }
        std::array<double, 12> tot{};
        for (std::size_t k = 1; k < ns; ++k) {
            const double dt = cand.snapshots[k].t - cand.snapshots[k - 1].t;
            for (std::size_t q = 0; q < tot.size(); ++q) tot[q] += 0.5 * dt * (slice[k][q] + slice[k - 1][q]);
        }
        const double th0 = detail::eval_t(tf, 0.0, T).first;
        double u0phi = 0.0, w0phi = 0.0, u0abs = 0.0, w0abs = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double pu = spec.u0(grid.center(i)) * X[i].X * th0;
            const double pw = spec.w0(grid.center(i)) * X[i].X * th0;
            u0phi += pu;
            w0phi += pw;
            u0abs += std::abs(pu);
            w0abs += std::abs(pw);
        }
        u0phi *= h;
        w0phi *= h;
        u0abs *= h;
        w0abs *= h;

        const auto normalized = [](double diff, double scale) { return scale > 0.0 ? std::abs(diff) / scale : 0.0; };
        ResidualRow row;
        row.label = tf.label();
        row.w3 = normalized(-tot[0] - u0phi - (tot[1] + tot[2] + tot[3]), tot[6] + u0abs + tot[7] + tot[8] + tot[9]);
        row.w4 = normalized(tot[4] + w0phi - tot[5], tot[10] + w0abs + tot[11]);
        rep.max_w3 = std::max(rep.max_w3, row.w3);
        rep.max_w4 = std::max(rep.max_w4, row.w4);
        rep.rows.push_back(row);
    }
    return rep;
}

struct ConcentrationPoint {
    double t = 0.0;
    double fraction = 0.0;
};

/// Share of the total mass sitting on the degeneracy set, per snapshot.
inline std::vector<ConcentrationPoint> concentration_diagnostic(const RunResult& run, const DegeneracyMask& mask,
                                                                const Grid1D& grid) {
    std::vector<ConcentrationPoint> out;
    for (const auto& s : run.snapshots) {
        const double total = integrate(s.u, grid);
        const double inside = integrate(s.u, grid, mask.zero_cells);
        out.push_back({s.t, total > 0.0 ? inside / total : 0.0});
    }
    return out;
}

} // namespace haptosim
