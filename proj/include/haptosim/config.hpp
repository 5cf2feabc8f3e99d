#pragma once

// Line-oriented run configuration:
//
//   # comment
//   [section]
//   key = value
//
// Function-valued keys hold "tag p1 p2 ...", list-valued keys hold
// comma-separated numbers. Every key has a default; an empty file describes
// the plateau problem.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "haptosim/error.hpp"
#include "haptosim/format.hpp"
#include "haptosim/functions.hpp"
#include "haptosim/model_spec.hpp"
#include "haptosim/pde_solver.hpp"
#include "haptosim/regularization.hpp"

namespace haptosim {

struct ProblemBlock {
    double a = 0.0;
    double b = 1.0;
    Formula d{"plateau", {0.5, 0.2}};
    Formula f{"zero", {}};
    Formula rho{"affine", {0.0, 0.0}};
    Formula g{"linear", {1.0}};
    Formula u0{"cosine", {1.0, 0.5, 2.0}};
    Formula w0{"cosine", {0.5, 0.3, 1.0}};
    double delta = 0.2;

    bool operator==(const ProblemBlock&) const = default;
};

struct DiscretizationBlock {
    std::size_t n = 200;
    StepControls controls;

    bool operator==(const DiscretizationBlock&) const = default;
};

struct GeometricSchedule {
    double base = 1e-2;
    double ratio = 0.1;
    std::size_t count = 3;

    bool operator==(const GeometricSchedule&) const = default;
};

struct ScheduleBlock {
    std::vector<double> eps_list{1e-2, 1e-3, 1e-4};
    std::optional<GeometricSchedule> geometric; ///< replaces eps_list when set
    double A = kDefaultA;

    std::vector<double> epsilons() const {
        if (!geometric) return eps_list;
        std::vector<double> e;
        double v = geometric->base;
        for (std::size_t k = 0; k < geometric->count; ++k, v *= geometric->ratio) e.push_back(v);
        return e;
    }

    bool operator==(const ScheduleBlock&) const = default;
};

struct ExperimentBlock {
    double T = 1.0;
    std::vector<double> output_times;  ///< explicit list; empty means uniform
    std::size_t output_count = 201;    ///< uniform count on [0,T] when no list is given
    double d_floor = 0.01;
    double margin = 0.1;
    std::size_t battery_size = 6;

    std::vector<double> times() const { return output_times.empty() ? uniform_times(T, output_count) : output_times; }

    bool operator==(const ExperimentBlock&) const = default;
};

struct OutputBlock {
    std::string directory = "out";
    bool plots = true;
    std::uint64_t seed = 1;

    bool operator==(const OutputBlock&) const = default;
};

struct RunConfig {
    ProblemBlock problem;
    DiscretizationBlock discretization;
    ScheduleBlock schedule;
    ExperimentBlock experiment;
    OutputBlock output;

    bool operator==(const RunConfig&) const = default;
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] inline void fail_at(ErrorKind kind, std::size_t line, const std::string& what) {
    throw Error(kind, "line " + std::to_string(line) + ": " + what);
}

inline double parse_real(const std::string& v, std::size_t line, const std::string& key) {
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        fail_at(ErrorKind::InvalidValue, line, key + ": expected a real number, got '" + v + "'");
    }
    if (used != v.size() || !std::isfinite(x))
        fail_at(ErrorKind::InvalidValue, line, key + ": expected a finite real number, got '" + v + "'");
    return x;
}

inline std::uint64_t parse_count(const std::string& v, std::size_t line, const std::string& key) {
    if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
        fail_at(ErrorKind::InvalidValue, line, key + ": expected a nonnegative integer, got '" + v + "'");
    try {
        return std::stoull(v);
    } catch (const std::exception&) {
        fail_at(ErrorKind::InvalidValue, line, key + ": integer out of range");
    }
}

inline bool parse_bool(const std::string& v, std::size_t line, const std::string& key) {
    if (v == "true" || v == "on" || v == "1") return true;
    if (v == "false" || v == "off" || v == "0") return false;
    fail_at(ErrorKind::InvalidValue, line, key + ": expected true/false, got '" + v + "'");
}

inline std::vector<double> parse_list(const std::string& v, std::size_t line, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(v);
    for (std::string item; std::getline(ss, item, ',');) out.push_back(parse_real(trim(item), line, key));
    return out;
}

inline Formula parse_formula(const std::string& v, std::size_t line, const std::string& key) {
    std::istringstream is(v);
    Formula fm;
    if (!(is >> fm.tag)) fail_at(ErrorKind::InvalidValue, line, key + ": expected 'tag p1 p2 ...'");
    for (std::string tok; is >> tok;) fm.params.push_back(parse_real(tok, line, key));
    return fm;
}

inline std::string render_formula(const Formula& fm) {
    std::string s = fm.tag;
    for (double p : fm.params) s += " " + fmt17(p);
    return s;
}

inline std::string render_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + fmt17(v[k]);
    return s;
}

/// Builds every callable once so unknown tags or bad arities surface at parse time.
inline void check_formulas(const ProblemBlock& p) {
    make_x_function(p.d, p.a, p.b);
    make_x_function(p.u0, p.a, p.b);
    make_x_function(p.w0, p.a, p.b);
    make_reaction(p.f);
    make_majorant(p.rho);
    make_absorption(p.g);
}

} // namespace detail

/// Domain checks that do not belong to a single line.
inline void validate_config(const RunConfig& c) {
    const auto bad = [](const std::string& what) { throw Error(ErrorKind::InvalidValue, what); };
    if (!(c.problem.a < c.problem.b)) bad("problem: need a < b");
    if (!(c.problem.delta > 0.0)) bad("problem.delta: expected > 0");
    try {
        detail::check_formulas(c.problem);
    } catch (const Error& e) {
        bad("problem: " + e.detail());
    }
    const auto& k = c.discretization.controls;
    if (c.discretization.n < 4) bad("discretization.n: expected >= 4");
    if (!(k.cfl > 0.0 && k.cfl <= 1.0)) bad("discretization.cfl: expected in (0,1]");
    if (!(k.dt_max > 0.0)) bad("discretization.dt_max: expected > 0");
    if (!(k.tol_lb >= 0.0 && k.tol_ub >= 0.0)) bad("discretization tolerances: expected >= 0");
    if (!(k.u_ceiling > 0.0 && k.w_ceiling > 0.0 && k.inv_g_ceiling > 0.0)) bad("discretization ceilings: expected > 0");
    const auto& s = c.schedule;
    if (s.geometric) {
        if (!(s.geometric->base > 0.0 && s.geometric->base < 1.0)) bad("schedule.base: expected in (0,1)");
        if (!(s.geometric->ratio > 0.0 && s.geometric->ratio < 1.0)) bad("schedule.ratio: expected in (0,1)");
        if (s.geometric->count < 1) bad("schedule.count: expected >= 1");
    } else {
        for (double e : s.eps_list)
            if (!(e > 0.0 && e < 1.0)) bad("schedule.eps_list: entries must lie in (0,1)");
        for (std::size_t i = 1; i < s.eps_list.size(); ++i)
            if (!(s.eps_list[i] < s.eps_list[i - 1])) bad("schedule.eps_list: expected strictly decreasing values");
    }
    if (!(s.A >= kDefaultA * (1.0 - 1e-15))) bad("schedule.A: expected >= e^e");
    const auto& x = c.experiment;
    if (!(x.T > 0.0)) bad("experiment.T: expected > 0");
    for (std::size_t i = 0; i < x.output_times.size(); ++i) {
        if (!(x.output_times[i] >= 0.0 && x.output_times[i] <= x.T)) bad("experiment.output_times: entries must lie in [0,T]");
        if (i > 0 && !(x.output_times[i] > x.output_times[i - 1])) bad("experiment.output_times: expected increasing values");
    }
    if (x.output_times.empty() && x.output_count < 2) bad("experiment.output_count: expected >= 2");
    if (!(x.d_floor >= 0.0)) bad("experiment.d_floor: expected >= 0");
    if (!(x.margin >= 0.0)) bad("experiment.margin: expected >= 0");
    if (x.battery_size < 1 || x.battery_size > 6) bad("experiment.battery_size: expected 1..6");
    if (c.output.directory.empty()) bad("output.directory: expected a path");
}

inline RunConfig parse_config(std::string_view text) {
    RunConfig c;
    std::string section;
    std::vector<std::string> seen;
    bool have_list = false, have_geo = false, have_times = false, have_count = false;
    GeometricSchedule geo;
    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++lineno;
        std::string line = detail::trim(raw.substr(0, raw.find('#')));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') detail::fail_at(ErrorKind::ParseError, lineno, "unterminated section header");
            section = detail::trim(std::string_view(line).substr(1, line.size() - 2));
            if (section != "problem" && section != "discretization" && section != "schedule" && section != "experiment" &&
                section != "output")
                detail::fail_at(ErrorKind::UnknownKey, lineno, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) detail::fail_at(ErrorKind::ParseError, lineno, "expected 'key = value'");
        const std::string key = detail::trim(std::string_view(line).substr(0, eq));
        const std::string val = detail::trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) detail::fail_at(ErrorKind::ParseError, lineno, "missing key");
        if (section.empty()) detail::fail_at(ErrorKind::ParseError, lineno, "key '" + key + "' outside any section");
        const std::string full = section + "." + key;
        if (std::find(seen.begin(), seen.end(), full) != seen.end())
            detail::fail_at(ErrorKind::ParseError, lineno, "duplicate key " + full);
        seen.push_back(full);

        const auto real = [&] { return detail::parse_real(val, lineno, full); };
        const auto count = [&] { return detail::parse_count(val, lineno, full); };
        const auto formula = [&] { return detail::parse_formula(val, lineno, full); };
        const auto flag = [&] { return detail::parse_bool(val, lineno, full); };
        auto& p = c.problem;
        auto& k = c.discretization.controls;
        auto& x = c.experiment;
        bool known = true;
        if (section == "problem") {
            if (key == "a") p.a = real();
            else if (key == "b") p.b = real();
            else if (key == "d") p.d = formula();
            else if (key == "f") p.f = formula();
            else if (key == "rho") p.rho = formula();
            else if (key == "g") p.g = formula();
            else if (key == "u0") p.u0 = formula();
            else if (key == "w0") p.w0 = formula();
            else if (key == "delta") p.delta = real();
            else known = false;
        } else if (section == "discretization") {
            if (key == "n") c.discretization.n = count();
            else if (key == "cfl") k.cfl = real();
            else if (key == "dt_max") k.dt_max = real();
            else if (key == "tol_lb") k.tol_lb = real();
            else if (key == "tol_ub") k.tol_ub = real();
            else if (key == "theta_w") k.theta_w = flag();
            else if (key == "u_ceiling") k.u_ceiling = real();
            else if (key == "w_ceiling") k.w_ceiling = real();
            else if (key == "inv_g_ceiling") k.inv_g_ceiling = real();
            else known = false;
        } else if (section == "schedule") {
            if (key == "eps_list") {
                c.schedule.eps_list = detail::parse_list(val, lineno, full);
                have_list = true;
            } else if (key == "base") {
                geo.base = real();
                have_geo = true;
            } else if (key == "ratio") {
                geo.ratio = real();
                have_geo = true;
            } else if (key == "count") {
                geo.count = count();
                have_geo = true;
            } else if (key == "A") c.schedule.A = real();
            else known = false;
        } else if (section == "experiment") {
            if (key == "T") x.T = real();
            else if (key == "output_times") {
                x.output_times = detail::parse_list(val, lineno, full);
                have_times = true;
            } else if (key == "output_count") {
                x.output_count = count();
                have_count = true;
            } else if (key == "d_floor") x.d_floor = real();
            else if (key == "margin") x.margin = real();
            else if (key == "battery_size") x.battery_size = count();
            else known = false;
        } else if (section == "output") {
            if (key == "directory") c.output.directory = val;
            else if (key == "plots") c.output.plots = flag();
            else if (key == "seed") c.output.seed = count();
            else known = false;
        }
        if (!known) detail::fail_at(ErrorKind::UnknownKey, lineno, "unknown key '" + key + "' in [" + section + "]");

        if (full == "schedule.eps_list") {
            const auto& e = c.schedule.eps_list;
            for (std::size_t i = 1; i < e.size(); ++i)
                if (!(e[i] < e[i - 1]))
                    detail::fail_at(ErrorKind::InvalidValue, lineno, full + ": expected strictly decreasing values");
        }
    }
    if (have_list && have_geo)
        throw Error(ErrorKind::InvalidValue, "schedule: give either eps_list or base/ratio/count, not both");
    if (have_times && have_count)
        throw Error(ErrorKind::InvalidValue, "experiment: give either output_times or output_count, not both");
    if (have_geo) c.schedule.geometric = geo;
    validate_config(c);
    return c;
}

inline std::string render_config(const RunConfig& c) {
    std::ostringstream os;
    const auto& p = c.problem;
    os << "[problem]\n"
       << "a = " << fmt17(p.a) << "\n"
       << "b = " << fmt17(p.b) << "\n"
       << "d = " << detail::render_formula(p.d) << "\n"
       << "f = " << detail::render_formula(p.f) << "\n"
       << "rho = " << detail::render_formula(p.rho) << "\n"
       << "g = " << detail::render_formula(p.g) << "\n"
       << "u0 = " << detail::render_formula(p.u0) << "\n"
       << "w0 = " << detail::render_formula(p.w0) << "\n"
       << "delta = " << fmt17(p.delta) << "\n\n";
    const auto& k = c.discretization.controls;
    os << "[discretization]\n"
       << "n = " << c.discretization.n << "\n"
       << "cfl = " << fmt17(k.cfl) << "\n"
       << "dt_max = " << fmt17(k.dt_max) << "\n"
       << "tol_lb = " << fmt17(k.tol_lb) << "\n"
       << "tol_ub = " << fmt17(k.tol_ub) << "\n"
       << "theta_w = " << (k.theta_w ? "true" : "false") << "\n"
       << "u_ceiling = " << fmt17(k.u_ceiling) << "\n"
       << "w_ceiling = " << fmt17(k.w_ceiling) << "\n"
       << "inv_g_ceiling = " << fmt17(k.inv_g_ceiling) << "\n\n";
    os << "[schedule]\n";
    if (c.schedule.geometric)
        os << "base = " << fmt17(c.schedule.geometric->base) << "\n"
           << "ratio = " << fmt17(c.schedule.geometric->ratio) << "\n"
           << "count = " << c.schedule.geometric->count << "\n";
    else
        os << "eps_list = " << detail::render_list(c.schedule.eps_list) << "\n";
    os << "A = " << fmt17(c.schedule.A) << "\n\n";
    const auto& x = c.experiment;
    os << "[experiment]\n"
       << "T = " << fmt17(x.T) << "\n";
    if (x.output_times.empty()) os << "output_count = " << x.output_count << "\n";
    else os << "output_times = " << detail::render_list(x.output_times) << "\n";
    os << "d_floor = " << fmt17(x.d_floor) << "\n"
       << "margin = " << fmt17(x.margin) << "\n"
       << "battery_size = " << x.battery_size << "\n\n";
    os << "[output]\n"
       << "directory = " << c.output.directory << "\n"
       << "plots = " << (c.output.plots ? "true" : "false") << "\n"
       << "seed = " << c.output.seed << "\n";
    return os.str();
}

inline ProblemSpec make_problem(const ProblemBlock& p) {
    ProblemSpec s;
    s.a = p.a;
    s.b = p.b;
    s.d = make_x_function(p.d, p.a, p.b);
    s.f = make_reaction(p.f);
    s.rho = make_majorant(p.rho);
    const auto g = make_absorption(p.g);
    s.g = g.g;
    s.g_prime = g.g_prime;
    s.u0 = make_x_function(p.u0, p.a, p.b);
    s.w0 = make_x_function(p.w0, p.a, p.b);
    s.delta = p.delta;
    return s;
}

} // namespace haptosim
