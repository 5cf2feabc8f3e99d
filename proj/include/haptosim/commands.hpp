#pragma once

// The validate | run | sweep | report pipelines behind the command-line tool.
// Each returns a process exit code and writes human-readable progress to `log`.

#include <algorithm>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "haptosim/config.hpp"
#include "haptosim/estimates.hpp"
#include "haptosim/experiments.hpp"
#include "haptosim/model_spec.hpp"
#include "haptosim/regularization.hpp"
#include "haptosim/report_io.hpp"

namespace haptosim {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitConfig = 2,
    kExitHypothesis = 3,
    kExitRunFailure = 4,
    kExitCheckFailure = 5,
};

struct PreparedProblem {
    ProblemSpec spec;
    DerivedConstants consts;
    ValidationReport validation;
};

inline std::size_t constant_samples(const RunConfig& cfg) { return std::max<std::size_t>(2000, 4 * cfg.discretization.n); }

/// Builds the problem and derives its constants; hypothesis failures are reported, not thrown.
inline PreparedProblem prepare(const RunConfig& cfg) {
    PreparedProblem p;
    p.spec = make_problem(cfg.problem);
    p.consts = derive_constants(p.spec, constant_samples(cfg));
    p.validation = validate_hypotheses(p.spec, p.consts, constant_samples(cfg));
    return p;
}

inline void print_constants(const DerivedConstants& c, std::ostream& log) {
    log << "M      = " << fmt17(c.M) << "\n"
        << "Gamma  = " << fmt17(c.Gamma) << "\n"
        << "gamma  = " << fmt17(c.gamma_low) << "\n"
        << "K1     = " << fmt17(c.K1) << "\n"
        << "rho(M) = " << fmt17(c.rhoM) << "\n"
        << "eps0   = " << fmt17(c.eps0) << "\n";
}

inline void print_validation(const ValidationReport& rep, std::ostream& log) {
    for (const auto& c : rep.checks)
        log << (c.pass ? "  ok    " : "  FAIL  ") << c.name << "  (" << fmt17(c.worst_margin) << ")"
            << (c.detail.empty() ? "" : "  " + c.detail) << "\n";
}

inline int cmd_validate(const RunConfig& cfg, std::ostream& log) {
    PreparedProblem p;
    try {
        p = prepare(cfg);
    } catch (const Error& e) {
        log << e.what() << "\n";
        return kExitHypothesis;
    }
    print_constants(p.consts, log);
    print_validation(p.validation, log);
    return p.validation.all_pass() ? kExitOk : kExitHypothesis;
}

namespace detail {

inline void write_level_outputs(const std::filesystem::path& dir, const RunResult& r, const EstimateReport& rep,
                                const Grid1D& grid) {
    const std::string tag = eps_tag(r.eps);
    write_file(dir / ("snapshots_" + tag + ".csv"), snapshots_csv(r, grid));
    write_file(dir / ("series_" + tag + ".csv"), series_csv(r));
    write_file(dir / ("audit_" + tag + ".csv"), rep.to_csv());
}

inline double min_d(const RegLevel& lv) { return *std::min_element(lv.d_eps.begin(), lv.d_eps.end()); }

} // namespace detail

/// One level end to end. Without `eps` the coarsest level valid up to T is used.
inline int cmd_run(const RunConfig& cfg, std::optional<double> eps, std::ostream& log) {
    PreparedProblem p;
    try {
        p = prepare(cfg);
    } catch (const Error& e) {
        log << e.what() << "\n";
        return kExitHypothesis;
    }
    if (!p.validation.all_pass()) {
        print_validation(p.validation, log);
        return kExitHypothesis;
    }
    const Grid1D grid(cfg.problem.a, cfg.problem.b, cfg.discretization.n);
    const double T = cfg.experiment.T;
    RegLevel lv;
    try {
        if (eps) {
            lv = build_level(p.spec, p.consts, grid, *eps, cfg.schedule.A);
        } else {
            const auto eps_list = cfg.schedule.epsilons();
            const auto sched = build_schedule(p.spec, p.consts, grid, eps_list, cfg.schedule.A);
            const auto sel = epsilon_star(T, sched, p.consts.Gamma);
            if (sel.levels.empty()) {
                log << sel.warning << "\n";
                return kExitConfig;
            }
            lv = sel.levels.front();
        }
    } catch (const Error& e) {
        log << e.what() << "\n";
        return kExitConfig;
    }
    if (T > lv.gate(p.consts.Gamma))
        log << "warning: T exceeds the gate " << fmt17(lv.gate(p.consts.Gamma)) << " of eps = " << eps_tag(lv.eps)
            << "; lower-barrier guarantees do not apply\n";

    const auto& ctl = cfg.discretization.controls;
    const auto r = run(lv, p.spec, p.consts, grid, T, ctl, cfg.experiment.times());
    const auto rep = audit_run(r, lv, p.spec, p.consts, grid, T, ctl);
    const std::filesystem::path dir = cfg.output.directory;
    detail::write_level_outputs(dir, r, rep, grid);
    if (cfg.output.plots) {
        std::vector<double> t, mass, y;
        for (const auto& s : r.series) {
            t.push_back(s.t);
            mass.push_back(s.mass);
            y.push_back(s.y);
        }
        write_file(dir / "mass.svg", svg_plot("mass", "t", "int u", {{"eps " + eps_tag(lv.eps), t, mass}}));
        write_file(dir / "entropy.svg", svg_plot("entropy", "t", "y", {{"eps " + eps_tag(lv.eps), t, y}}));
    }
    log << "eps = " << eps_tag(lv.eps) << ", steps = " << r.series.size() - 1 << "\n" << rep.to_text();
    if (!r.completed()) {
        log << "blow-up detector fired at t = " << fmt17(r.failure_time) << ": " << r.failure_quantity << "\n";
        return kExitRunFailure;
    }
    return rep.all_pass() ? kExitOk : kExitCheckFailure;
}

struct SweepOutcome {
    SweepResult sweep;
    CauchyTable cauchy;
    std::vector<OdeComparison> ode;
    std::vector<WeakResidualReport> residuals;
    std::vector<SweepRow> rows;
};

inline SweepOutcome execute_sweep(const RunConfig& cfg, const PreparedProblem& p, std::ostream& log) {
    const Grid1D grid(cfg.problem.a, cfg.problem.b, cfg.discretization.n);
    const double T = cfg.experiment.T;
    const auto sched = build_schedule(p.spec, p.consts, grid, cfg.schedule.epsilons(), cfg.schedule.A);
    const auto sel = epsilon_star(T, sched, p.consts.Gamma);
    if (!sel.warning.empty()) log << "warning: " << sel.warning << "\n";
    for (const auto& lv : sched.levels)
        if (T > lv.gate(p.consts.Gamma))
            log << "warning: eps = " << eps_tag(lv.eps) << " is run beyond its gate "
                << fmt17(lv.gate(p.consts.Gamma)) << "\n";

    SweepOutcome out;
    out.sweep = run_sweep(p.spec, p.consts, grid, sched.levels, T, cfg.discretization.controls, cfg.experiment.times());
    out.cauchy = cauchy_table(out.sweep, p.spec, grid, cfg.experiment.d_floor);
    if (!out.cauchy.warning.empty()) log << "warning: " << out.cauchy.warning << "\n";
    const auto mask = classify(grid.sample(p.spec.d), grid, 0.0, cfg.experiment.margin);
    if (mask.count_interior() > 0) out.ode = compare_limit_ode(out.sweep, p.spec, p.consts, grid, mask);
    else log << "note: no interior zero cells, limit-ODE comparison skipped\n";
    for (const auto& r : out.sweep.runs)
        out.residuals.push_back(r.snapshots.size() >= 2 ? weak_residual(r, p.spec, grid, cfg.experiment.battery_size)
                                                        : WeakResidualReport{});

    for (std::size_t k = 0; k < sched.levels.size(); ++k) {
        const auto& lv = sched.levels[k];
        const auto& rep = out.sweep.reports[k];
        SweepRow row;
        row.eps = lv.eps;
        row.delta_eps = lv.delta_eps;
        row.eta_eps = lv.eta_eps;
        row.min_d_eps = detail::min_d(lv);
        row.gate = lv.gate(p.consts.Gamma);
        row.within_gate = out.sweep.runs[k].within_gate;
        row.completed = out.sweep.runs[k].completed();
        row.audit_pass = rep.all_pass();
        row.min_margin = HUGE_VAL;
        for (const auto& c : rep.checks) row.min_margin = std::min(row.min_margin, c.margin);
        if (k > 0) {
            row.cauchy_u = out.cauchy.du[k - 1];
            row.cauchy_w = out.cauchy.dw[k - 1];
        }
        if (!out.ode.empty()) {
            row.ode_sup_u = out.ode[k].sup_u;
            row.ode_sup_w = out.ode[k].sup_w;
            row.ode_final_w = out.ode[k].final_w;
        }
        row.residual_w3 = out.residuals[k].max_w3;
        row.residual_w4 = out.residuals[k].max_w4;
        out.rows.push_back(row);
    }
    return out;
}

inline void write_sweep_plots(const std::filesystem::path& dir, const std::vector<double>& eps,
                              const std::vector<CsvTable>& series, const std::vector<SweepRow>& rows,
                              const std::vector<std::vector<ConcentrationPoint>>& fractions) {
    std::vector<PlotSeries> mass, ent, frac;
    for (std::size_t k = 0; k < eps.size(); ++k) {
        const std::string lab = "eps " + eps_tag(eps[k]);
        mass.push_back({lab, series[k].values("t"), series[k].values("mass")});
        ent.push_back({lab, series[k].values("t"), series[k].values("y")});
        if (k < fractions.size()) {
            PlotSeries f{lab, {}, {}};
            for (const auto& pt : fractions[k]) {
                f.x.push_back(pt.t);
                f.y.push_back(pt.fraction);
            }
            frac.push_back(f);
        }
    }
    PlotSeries du{"u", {}, {}}, dw{"w", {}, {}};
    for (std::size_t k = 1; k < rows.size(); ++k) {
        du.x.push_back(static_cast<double>(k));
        du.y.push_back(rows[k].cauchy_u);
        dw.x.push_back(static_cast<double>(k));
        dw.y.push_back(rows[k].cauchy_w);
    }
    write_file(dir / "mass.svg", svg_plot("mass", "t", "int u", mass));
    write_file(dir / "entropy.svg", svg_plot("entropy", "t", "y", ent));
    if (!frac.empty()) write_file(dir / "concentration.svg", svg_plot("mass fraction in {d=0}", "t", "fraction", frac));
    write_file(dir / "cauchy.svg", svg_plot("Cauchy distances", "k", "D_k", {du, dw}));
}

inline void print_sweep_rows(const std::vector<SweepRow>& rows, std::ostream& log) {
    log << "eps          gate         completed audit  cauchy_u     cauchy_w     ode_final_w  w3           w4\n";
    for (const auto& r : rows) {
        const auto col = [](double v) {
            std::string s = std::isfinite(v) ? fmt17(v).substr(0, 11) : "-";
            s.resize(13, ' ');
            return s;
        };
        log << col(r.eps) << col(r.gate) << (r.completed ? "yes       " : "NO        ") << (r.audit_pass ? "pass   " : "FAIL   ")
            << col(r.cauchy_u) << col(r.cauchy_w) << col(r.ode_final_w) << col(r.residual_w3) << col(r.residual_w4)
            << "\n";
    }
}

inline int cmd_sweep(const RunConfig& cfg, std::ostream& log) {
    PreparedProblem p;
    try {
        p = prepare(cfg);
    } catch (const Error& e) {
        log << e.what() << "\n";
        return kExitHypothesis;
    }
    if (!p.validation.all_pass()) {
        print_validation(p.validation, log);
        return kExitHypothesis;
    }
    SweepOutcome out;
    try {
        out = execute_sweep(cfg, p, log);
    } catch (const Error& e) {
        log << e.what() << "\n";
        return e.kind() == ErrorKind::EmptySchedule || e.kind() == ErrorKind::InvalidValue ? kExitConfig : kExitRunFailure;
    }
    const Grid1D grid(cfg.problem.a, cfg.problem.b, cfg.discretization.n);
    const std::filesystem::path dir = cfg.output.directory;
    const auto mask = classify(grid.sample(p.spec.d), grid, 0.0, cfg.experiment.margin);
    std::vector<double> eps;
    std::vector<CsvTable> series;
    std::vector<std::vector<ConcentrationPoint>> fractions;
    for (std::size_t k = 0; k < out.sweep.runs.size(); ++k) {
        const auto& r = out.sweep.runs[k];
        detail::write_level_outputs(dir, r, out.sweep.reports[k], grid);
        eps.push_back(r.eps);
        series.push_back(parse_csv(series_csv(r)));
        fractions.push_back(concentration_diagnostic(r, mask, grid));
    }
    write_file(dir / "sweep.csv", sweep_csv(out.rows));
    if (cfg.output.plots) write_sweep_plots(dir, eps, series, out.rows, fractions);
    print_sweep_rows(out.rows, log);

    bool completed = true, audits = true;
    for (const auto& r : out.rows) {
        completed = completed && r.completed;
        audits = audits && r.audit_pass;
    }
    if (!completed) return kExitRunFailure;
    return audits ? kExitOk : kExitCheckFailure;
}

/// Re-renders plots and the summary from the CSVs of an earlier sweep.
inline int cmd_report(const std::filesystem::path& dir, bool plots, std::ostream& log) {
    CsvTable table;
    try {
        table = parse_csv(read_file(dir / "sweep.csv"));
    } catch (const Error& e) {
        log << e.what() << "\n";
        return kExitConfig;
    }
    std::vector<SweepRow> rows;
    std::vector<double> eps;
    std::vector<CsvTable> series;
    try {
        for (const auto& v : table.rows) {
            SweepRow r;
            const auto at = [&](const char* name) { return v.at(table.column(name)); };
            r.eps = at("eps");
            r.delta_eps = at("delta_eps");
            r.eta_eps = at("eta_eps");
            r.min_d_eps = at("min_d_eps");
            r.gate = at("gate");
            r.within_gate = at("within_gate") != 0.0;
            r.completed = at("completed") != 0.0;
            r.audit_pass = at("audit_pass") != 0.0;
            r.min_margin = at("min_margin");
            r.cauchy_u = at("cauchy_u");
            r.cauchy_w = at("cauchy_w");
            r.ode_sup_u = at("ode_sup_u");
            r.ode_sup_w = at("ode_sup_w");
            r.ode_final_w = at("ode_final_w");
            r.residual_w3 = at("residual_w3");
            r.residual_w4 = at("residual_w4");
            rows.push_back(r);
            eps.push_back(r.eps);
            series.push_back(parse_csv(read_file(dir / ("series_" + eps_tag(r.eps) + ".csv"))));
        }
        if (plots) write_sweep_plots(dir, eps, series, rows, {});
    } catch (const Error& e) {
        log << e.what() << "\n";
        return kExitConfig;
    }
    print_sweep_rows(rows, log);
    bool ok = true;
    for (const auto& r : rows) ok = ok && r.completed && r.audit_pass;
    return ok ? kExitOk : kExitCheckFailure;
}

} // namespace haptosim
