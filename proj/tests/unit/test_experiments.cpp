#include <gtest/gtest.h>

#include "support/problems.hpp"

using namespace haptosim;
using testing_support::plateau;
using testing_support::uniform;

namespace {

struct Small {
    ProblemSpec spec = plateau();
    DerivedConstants consts = derive_constants(spec, 2000);
    Grid1D grid{0.0, 1.0, 60};
    DegeneracyMask mask = classify(grid.sample(spec.d), grid, 1e-14, 0.1);

    SweepResult sweep(std::vector<double> eps, double T = 0.3) const {
        const auto sched = build_schedule(spec, consts, grid, eps);
        return run_sweep(spec, consts, grid, sched.levels, T, StepControls{}, uniform_times(T, 7));
    }
};

} // namespace

TEST(Sweep, EmptyScheduleThrows) {
    const Small s;
    try {
        run_sweep(s.spec, s.consts, s.grid, {}, 1.0, StepControls{}, {});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::EmptySchedule);
    }
}

TEST(Sweep, CandidateIsFinestLevel) {
    const Small s;
    const auto sw = s.sweep({1e-2, 1e-3});
    EXPECT_EQ(sw.candidate, 1u);
    EXPECT_EQ(sw.runs.size(), 2u);
    for (const auto& r : sw.reports) EXPECT_TRUE(r.all_pass()) << r.to_text();
}

TEST(Cauchy, IdenticalLevelsGiveZero) {
    const Small s;
    auto sw = s.sweep({1e-2, 1e-3});
    sw.runs[1] = sw.runs[0];
    const auto tab = cauchy_table(sw, s.spec, s.grid, 0.01);
    ASSERT_EQ(tab.du.size(), 1u);
    EXPECT_EQ(tab.du[0], 0.0);
    EXPECT_EQ(tab.dw[0], 0.0);
    EXPECT_TRUE(tab.warning.empty());
    EXPECT_GT(tab.region_cells, 0u);
}

TEST(Cauchy, EmptyRegionWarns) {
    const Small s;
    const auto sw = s.sweep({1e-2, 1e-3});
    const auto tab = cauchy_table(sw, s.spec, s.grid, 1.0);
    EXPECT_EQ(tab.region_cells, 0u);
    EXPECT_NE(tab.warning.find("EmptyRegion"), std::string::npos);
    EXPECT_EQ(tab.du[0], 0.0);
}

TEST(LimitComparison, NoDegeneracyThrows) {
    auto s = Small{};
    s.mask = classify(s.grid.constant(1.0), s.grid, 1e-14, 0.1);
    const auto sw = s.sweep({1e-2});
    try {
        compare_limit_ode(sw, s.spec, s.consts, s.grid, s.mask);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NoDegeneracy);
    }
}

TEST(LimitComparison, ErrorShrinksWithEps) {
    const Small s;
    const auto sw = s.sweep({1e-2, 1e-4});
    const auto cmp = compare_limit_ode(sw, s.spec, s.consts, s.grid, s.mask);
    ASSERT_EQ(cmp.size(), 2u);
    EXPECT_LT(cmp[1].final_w, cmp[0].final_w);
    EXPECT_LE(cmp[1].final_w, cmp[1].sup_w);
}

TEST(WeakResidual, ExactSpatiallyFlatSolution) {
    // d = 1, f = 0, g = id: u = c, w = w0 e^{-c t} solves the system exactly
    const auto spec = uniform(0.7, 0.4);
    const Grid1D g(0.0, 1.0, 40);
    RunResult r;
    const double T = 1.0;
    for (double t : uniform_times(T, 2001)) r.snapshots.push_back({t, g.constant(0.7), g.constant(0.4 * std::exp(-0.7 * t))});
    const auto rep = weak_residual(r, spec, g, 6);
    ASSERT_EQ(rep.rows.size(), 6u);
    EXPECT_LT(rep.max_w3, 1e-6);
    EXPECT_LT(rep.max_w4, 1e-6);
}

TEST(WeakResidual, DetectsWrongSolution) {
    const auto spec = uniform(0.7, 0.4);
    const Grid1D g(0.0, 1.0, 40);
    RunResult r;
    for (double t : uniform_times(1.0, 201)) r.snapshots.push_back({t, g.constant(0.7), g.constant(0.4)});
    EXPECT_GT(weak_residual(r, spec, g, 6).max_w4, 0.1);
    RunResult one;
    one.snapshots.push_back(r.snapshots.front());
    EXPECT_THROW(weak_residual(one, spec, g, 6), Error);
}

TEST(WeakResidual, BatterySize) {
    EXPECT_EQ(default_battery(6).size(), 6u);
    EXPECT_EQ(default_battery(2).size(), 2u);
    EXPECT_EQ(default_battery(100).size(), 6u);
    EXPECT_EQ(default_battery(6)[0].label(), "X0_bump");
}

TEST(Concentration, NoZeroSetGivesZero) {
    const Grid1D g(0.0, 1.0, 30);
    const auto mask = classify(g.constant(1.0), g, 1e-14, 0.1);
    RunResult r;
    r.snapshots.push_back({0.0, g.constant(1.0), g.constant(0.5)});
    const auto c = concentration_diagnostic(r, mask, g);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].fraction, 0.0);
}

TEST(Concentration, PlateauShare) {
    const Small s;
    RunResult r;
    r.snapshots.push_back({0.0, s.grid.constant(1.0), s.grid.constant(0.5)});
    EXPECT_NEAR(concentration_diagnostic(r, s.mask, s.grid)[0].fraction, 0.4, 1e-12);
}

TEST(Parallel, PropagatesFirstError) {
    std::vector<int> hits(8, 0);
    parallel_for(hits.size(), [&](std::size_t k) { hits[k] = 1; });
    EXPECT_EQ(std::accumulate(hits.begin(), hits.end(), 0), 8);
    EXPECT_THROW(parallel_for(4, [](std::size_t k) {
                     if (k == 2) throw Error(ErrorKind::InvalidValue, "boom");
                 }),
                 Error);
}
