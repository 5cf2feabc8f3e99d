#pragma once

#include <cmath>
#include <numbers>

#include "haptosim/haptosim.hpp"

namespace testing_support {

using namespace haptosim;

inline ProblemSpec with_linear_g(ProblemSpec s) {
    const auto g = make_absorption({"linear", {1.0}});
    s.g = g.g;
    s.g_prime = g.g_prime;
    return s;
}

/// d = (max(0,|x-0.5|-0.2))^2 on (0,1), u0 = 1 + cos(2 pi x)/2, w0 = 0.5 + 0.3 cos(pi x), delta = 0.2, g = id, f = 0.
inline ProblemSpec plateau() {
    ProblemSpec s;
    s.d = make_x_function({"plateau", {0.5, 0.2}}, 0.0, 1.0);
    s.f = make_reaction({"zero", {}});
    s.rho = make_majorant({"affine", {0.0, 0.0}});
    s.u0 = make_x_function({"cosine", {1.0, 0.5, 2.0}}, 0.0, 1.0);
    s.w0 = make_x_function({"cosine", {0.5, 0.3, 1.0}}, 0.0, 1.0);
    s.delta = 0.2;
    return with_linear_g(s);
}

/// Constant data with d = 1 everywhere.
inline ProblemSpec uniform(double u0, double w0, double delta = 0.5) {
    ProblemSpec s;
    s.d = [](double) { return 1.0; };
    s.f = [](double, double, double) { return 0.0; };
    s.rho = [](double) { return 0.0; };
    s.u0 = [u0](double) { return u0; };
    s.w0 = [w0](double) { return w0; };
    s.delta = delta;
    return with_linear_g(s);
}

inline double plateau_u0(double x) { return 1.0 + 0.5 * std::cos(2.0 * std::numbers::pi * x); }

} // namespace testing_support
