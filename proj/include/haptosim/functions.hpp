#pragma once

// Tagged formula families for the problem's coefficient functions. Each
// family is a tag plus a parameter list; the tag/params pair is what the
// config file stores, and the factories below turn it into callables.

#include <cmath>
#include <algorithm>
#include <functional>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <math.h> // boost 1.74 pchip calls isnan unqualified

#include <boost/math/interpolators/pchip.hpp>

#include "haptosim/error.hpp"

namespace haptosim {

struct Formula {
    std::string tag;
    std::vector<double> params;

    bool operator==(const Formula&) const = default;
};

using XFn = std::function<double(double)>;
using FFn = std::function<double(double, double, double)>;
using WFn = std::function<double(double)>;

namespace detail {

inline void require_params(const Formula& fm, std::size_t count, const char* role) {
    if (fm.params.size() != count) {
        std::ostringstream os;
        os << role << " family '" << fm.tag << "' expects " << count << " parameters, got " << fm.params.size();
        throw Error(ErrorKind::InvalidValue, os.str());
    }
}

/// Monotone (Fritsch-Carlson type) cubic through uniformly spaced samples on [lo,hi].
class UniformPchip {
public:
    UniformPchip(double lo, double hi, std::vector<double> values) : lo_(lo), hi_(hi) {
        if (values.size() < 4) throw Error(ErrorKind::InvalidValue, "tabulated data needs at least 4 samples");
        if (!(lo < hi)) throw Error(ErrorKind::InvalidValue, "tabulated range must be nonempty");
        std::vector<double> x(values.size());
        for (std::size_t i = 0; i < x.size(); ++i)
            x[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(x.size() - 1);
        x.back() = hi;
        interp_ = std::make_shared<Interp>(std::move(x), std::move(values));
    }

    double operator()(double x) const { return (*interp_)(clamp(x)); }
    double prime(double x) const { return interp_->prime(clamp(x)); }

private:
    using Interp = boost::math::interpolators::pchip<std::vector<double>>;

    double clamp(double x) const { return x < lo_ ? lo_ : (x > hi_ ? hi_ : x); }

    double lo_;
    double hi_;
    std::shared_ptr<Interp> interp_;
};

} // namespace detail

/// Families on the spatial interval [a,b]; x̂ = (x-a)/(b-a).
///   constant c | cosine mean amp k | plateau center halfwidth | sin2 k | tabulated v0..vm
inline XFn make_x_function(const Formula& fm, double a, double b) {
    const double len = b - a;
    const auto& p = fm.params;
    if (fm.tag == "constant") {
        detail::require_params(fm, 1, "spatial");
        return [c = p[0]](double) { return c; };
    }
    if (fm.tag == "cosine") {
        detail::require_params(fm, 3, "spatial");
        return [=](double x) { return p[0] + p[1] * std::cos(p[2] * std::numbers::pi * (x - a) / len); };
    }
    if (fm.tag == "plateau") {
        detail::require_params(fm, 2, "spatial");
        return [c = p[0], r = p[1]](double x) {
            const double s = std::max(0.0, std::abs(x - c) - r);
            return s * s;
        };
    }
    if (fm.tag == "sin2") {
        detail::require_params(fm, 1, "spatial");
        return [=](double x) {
            const double s = std::sin(p[0] * std::numbers::pi * (x - a) / len);
            return s * s;
        };
    }
    if (fm.tag == "tabulated") {
        detail::UniformPchip interp(a, b, p);
        return [interp](double x) { return interp(x); };
    }
    throw Error(ErrorKind::InvalidValue, "unknown spatial family '" + fm.tag + "'");
}

/// Reaction term f(x,u,w).  bilinear c0 cu cw cuw : c0 + cu*u + cw*w + cuw*u*w | zero
inline FFn make_reaction(const Formula& fm) {
    if (fm.tag == "zero") {
        detail::require_params(fm, 0, "reaction");
        return [](double, double, double) { return 0.0; };
    }
    if (fm.tag == "bilinear") {
        detail::require_params(fm, 4, "reaction");
        const auto p = fm.params;
        return [p](double, double u, double w) { return p[0] + p[1] * u + p[2] * w + p[3] * u * w; };
    }
    throw Error(ErrorKind::InvalidValue, "unknown reaction family '" + fm.tag + "'");
}

/// Majorant rho(w).  affine r0 r1 : r0 + r1*w, with r0, r1 >= 0 | tabulated wmax v0..vm
inline WFn make_majorant(const Formula& fm) {
    if (fm.tag == "affine") {
        detail::require_params(fm, 2, "majorant");
        if (fm.params[0] < 0.0 || fm.params[1] < 0.0)
            throw Error(ErrorKind::InvalidValue, "affine majorant needs r0 >= 0 and r1 >= 0");
        return [r0 = fm.params[0], r1 = fm.params[1]](double w) { return r0 + r1 * w; };
    }
    if (fm.tag == "tabulated") {
        if (fm.params.size() < 5) throw Error(ErrorKind::InvalidValue, "tabulated majorant needs wmax and >= 4 samples");
        detail::UniformPchip interp(0.0, fm.params[0], {fm.params.begin() + 1, fm.params.end()});
        return [interp](double w) { return interp(w); };
    }
    throw Error(ErrorKind::InvalidValue, "unknown majorant family '" + fm.tag + "'");
}

struct AbsorptionFn {
    WFn g;
    WFn g_prime;
};

/// Absorption g(w) with analytic derivative.
///   linear c | logistic | mixed c1 c2 | power c p | tabulated wmax v0..vm
inline AbsorptionFn make_absorption(const Formula& fm) {
    const auto& p = fm.params;
    if (fm.tag == "linear") {
        detail::require_params(fm, 1, "absorption");
        const double c = p[0];
        return {[c](double w) { return c * w; }, [c](double) { return c; }};
    }
    if (fm.tag == "logistic") {
        detail::require_params(fm, 0, "absorption");
        return {[](double w) { return w * (1.0 - w); }, [](double w) { return 1.0 - 2.0 * w; }};
    }
    if (fm.tag == "mixed") {
        detail::require_params(fm, 2, "absorption");
        const double c1 = p[0], c2 = p[1];
        return {[=](double w) { return c1 * w + c2 * w * (1.0 - w); }, [=](double w) { return c1 + c2 * (1.0 - 2.0 * w); }};
    }
    if (fm.tag == "power") {
        detail::require_params(fm, 2, "absorption");
        const double c = p[0], e = p[1];
        return {[=](double w) { return c * std::pow(w, e); },
                [=](double w) { return w == 0.0 && e < 1.0 ? HUGE_VAL : c * e * std::pow(w, e - 1.0); }};
    }
    if (fm.tag == "tabulated") {
        if (p.size() < 5) throw Error(ErrorKind::InvalidValue, "tabulated absorption needs wmax and >= 4 samples");
        detail::UniformPchip interp(0.0, p[0], {p.begin() + 1, p.end()});
        return {[interp](double w) { return interp(w); }, [interp](double w) { return interp.prime(w); }};
    }
    throw Error(ErrorKind::InvalidValue, "unknown absorption family '" + fm.tag + "'");
}

} // namespace haptosim
