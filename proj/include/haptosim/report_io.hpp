#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "haptosim/error.hpp"
#include "haptosim/experiments.hpp"
#include "haptosim/format.hpp"
#include "haptosim/grid.hpp"
#include "haptosim/pde_solver.hpp"

namespace haptosim {

inline std::string snapshots_csv(const RunResult& r, const Grid1D& grid) {
    std::string out = "t,x,u,w\n";
    for (const auto& s : r.snapshots)
        for (std::size_t i = 0; i < grid.n(); ++i)
            out += fmt17(s.t) + "," + fmt17(grid.center(i)) + "," + fmt17(s.u[i]) + "," + fmt17(s.w[i]) + "\n";
    return out;
}

inline std::string series_csv(const RunResult& r) {
    std::string out = "t,dt,mass,min_u,max_u,min_w,max_w,y,h\n";
    for (const auto& s : r.series)
        out += fmt17(s.t) + "," + fmt17(s.dt) + "," + fmt17(s.mass) + "," + fmt17(s.min_u) + "," + fmt17(s.max_u) + "," +
               fmt17(s.min_w) + "," + fmt17(s.max_w) + "," + fmt17(s.y) + "," + fmt17(s.h) + "\n";
    return out;
}

/// One sweep-summary row per level. Cauchy columns hold the distance to the previous (coarser) level.
struct SweepRow {
    double eps = 0.0;
    double delta_eps = 0.0;
    double eta_eps = 0.0;
    double min_d_eps = 0.0;
    double gate = 0.0;
    bool within_gate = false;
    bool completed = false;
    bool audit_pass = false;
    double min_margin = 0.0;
    double cauchy_u = NAN;
    double cauchy_w = NAN;
    double ode_sup_u = NAN;
    double ode_sup_w = NAN;
    double ode_final_w = NAN;
    double residual_w3 = NAN;
    double residual_w4 = NAN;
};

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out =
        "eps,delta_eps,eta_eps,min_d_eps,gate,within_gate,completed,audit_pass,min_margin,cauchy_u,cauchy_w,"
        "ode_sup_u,ode_sup_w,ode_final_w,residual_w3,residual_w4\n";
    for (const auto& r : rows) {
        const double v[] = {r.eps, r.delta_eps, r.eta_eps, r.min_d_eps, r.gate};
        for (double x : v) out += fmt17(x) + ",";
        out += std::string(r.within_gate ? "1" : "0") + "," + (r.completed ? "1" : "0") + "," + (r.audit_pass ? "1" : "0");
        const double w[] = {r.min_margin, r.cauchy_u,  r.cauchy_w,    r.ode_sup_u,
                            r.ode_sup_w,  r.ode_final_w, r.residual_w3, r.residual_w4};
        for (double x : w) out += "," + fmt17(x);
        out += "\n";
    }
    return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
    os << bytes;
    if (!os) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorKind::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw Error(ErrorKind::Io, "missing CSV column '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    }

    std::vector<double> values(const std::string& name) const {
        const std::size_t c = column(name);
        std::vector<double> v;
        for (const auto& r : rows) v.push_back(r.at(c));
        return v;
    }
};

/// Numeric CSV with a header row. Cells that are not numbers (e.g. check names) read as NaN.
inline CsvTable parse_csv(const std::string& text) {
    CsvTable t;
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) return t;
    std::stringstream hs(line);
    for (std::string cell; std::getline(hs, cell, ',');) t.header.push_back(cell);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream rs(line);
        for (std::string cell; std::getline(rs, cell, ',');) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            row.push_back(end != cell.c_str() && *end == '\0' ? v : NAN);
        }
        if (row.size() != t.header.size()) throw Error(ErrorKind::Io, "ragged CSV row");
        t.rows.push_back(std::move(row));
    }
    return t;
}

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Line plot as a standalone SVG document; non-finite points are dropped.
inline std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                            const std::vector<PlotSeries>& series) {
    constexpr double W = 640, H = 400, L = 70, R = 150, Tm = 40, B = 50;
    double x0 = HUGE_VAL, x1 = -HUGE_VAL, y0 = HUGE_VAL, y1 = -HUGE_VAL;
    for (const auto& s : series)
        for (std::size_t k = 0; k < s.x.size(); ++k)
            if (std::isfinite(s.x[k]) && std::isfinite(s.y[k])) {
                x0 = std::min(x0, s.x[k]);
                x1 = std::max(x1, s.x[k]);
                y0 = std::min(y0, s.y[k]);
                y1 = std::max(y1, s.y[k]);
            }
    if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y0 -= 0.5, y1 += 0.5;
    const auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    const auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - Tm - B); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
    os << "<rect x=\"" << L << "\" y=\"" << Tm << "\" width=\"" << W - L - R << "\" height=\"" << H - Tm - B
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<text x=\"" << L << "\" y=\"" << H - B + 16 << "\">" << fmt17(x0).substr(0, 10) << "</text>\n";
    os << "<text x=\"" << W - R << "\" y=\"" << H - B + 16 << "\" text-anchor=\"end\">" << fmt17(x1).substr(0, 10) << "</text>\n";
    os << "<text x=\"" << L - 4 << "\" y=\"" << H - B << "\" text-anchor=\"end\">" << fmt17(y0).substr(0, 10) << "</text>\n";
    os << "<text x=\"" << L - 4 << "\" y=\"" << Tm + 10 << "\" text-anchor=\"end\">" << fmt17(y1).substr(0, 10) << "</text>\n";
    os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << xlabel << "</text>\n";
    os << "<text x=\"16\" y=\"" << (Tm + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << (Tm + H - B) / 2 << ")\">" << ylabel << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* c = colors[k % 6];
        os << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t j = 0; j < s.x.size(); ++j)
            if (std::isfinite(s.x[j]) && std::isfinite(s.y[j])) os << px(s.x[j]) << "," << py(s.y[j]) << " ";
        os << "\"/>\n";
        os << "<text x=\"" << W - R + 10 << "\" y=\"" << Tm + 16 * (k + 1) << "\" fill=\"" << c << "\">" << s.label
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace haptosim
