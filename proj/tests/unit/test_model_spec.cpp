#include <gtest/gtest.h>

#include <random>

#include "support/problems.hpp"

using namespace haptosim;
using testing_support::plateau;
using testing_support::uniform;

TEST(DeriveConstants, IdentityAbsorption) {
    const auto c = derive_constants(uniform(1.0, 0.5, 0.5), 1000);
    EXPECT_NEAR(c.M, 1.0, 1e-12);
    EXPECT_NEAR(c.Gamma, 1.0, 1e-12);
    EXPECT_NEAR(c.gamma_low, 1.0, 1e-12);
    EXPECT_NEAR(c.gM, 1.0, 1e-12);
}

TEST(DeriveConstants, LogisticAbsorption) {
    auto s = uniform(1.0, 0.125, 0.125);
    const auto g = make_absorption({"logistic", {}});
    s.g = g.g;
    s.g_prime = g.g_prime;
    const auto c = derive_constants(s, 1000);
    EXPECT_NEAR(c.M, 0.25, 1e-15);
    EXPECT_NEAR(c.Gamma, 1.0, 1e-8);
    // (1-2w)/(w(1-w)) is decreasing on (0, 1/4]
    const double w = 0.25;
    EXPECT_NEAR(c.gamma_low, (1.0 - 2.0 * w) / (w * (1.0 - w)), 1e-8);
}

TEST(DeriveConstants, PlateauK1) {
    const auto c = derive_constants(plateau(), 2000);
    EXPECT_NEAR(c.K1, 4.0, 1e-8);
    EXPECT_NEAR(c.M, 1.0, 1e-12);
    EXPECT_NEAR(c.eps0, 0.02, 1e-12);
}

TEST(DeriveConstants, FiniteDifferenceDerivative) {
    auto s = plateau();
    s.g_prime = nullptr;
    const auto c = derive_constants(s, 2000);
    EXPECT_NEAR(c.gamma_low, 1.0, 1e-6);
    EXPECT_NEAR(c.Gamma, 1.0, 1e-6);
}

TEST(DeriveConstants, RejectsNonmonotoneG) {
    auto s = plateau();
    s.g = [](double w) { return w * (1.0 - w); };
    s.g_prime = [](double w) { return 1.0 - 2.0 * w; };
    EXPECT_THROW(derive_constants(s, 500), Error); // M = 1, g' < 0 past 1/2
}

TEST(DeriveConstants, PropertyOverMixedFamily) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> coef(0.0, 2.0), mdist(0.05, 0.45);
    for (int trial = 0; trial < 20; ++trial) {
        const double c1 = coef(rng), c2 = coef(rng) + 1e-3, M = mdist(rng);
        auto s = uniform(1.0, M / 2.0, M / 2.0);
        const auto g = make_absorption({"mixed", {c1, c2}});
        s.g = g.g;
        s.g_prime = g.g_prime;
        const auto c = derive_constants(s, 400);
        for (double w : detail::nodes(0.0, c.M, 400)) {
            if (w == 0.0) continue;
            EXPECT_LE(s.g(w), c.Gamma * w * (1.0 + 1e-12));
            EXPECT_GE(s.g_prime(w) / s.g(w), c.gamma_low * (1.0 - 1e-12));
        }
    }
}

TEST(ValidateHypotheses, PlateauPasses) {
    const auto s = plateau();
    const auto rep = validate_hypotheses(s, derive_constants(s, 2000), 2000);
    for (const auto& c : rep.checks) EXPECT_TRUE(c.pass) << c.name << " " << c.detail;
}

TEST(ValidateHypotheses, ReactionBelowMajorant) {
    auto s = plateau();
    s.f = [](double, double u, double w) { return w * (1.0 - u); };
    s.rho = [](double w) { return w; };
    const auto rep = validate_hypotheses(s, derive_constants(s, 500), 500);
    ASSERT_NE(rep.find("f_below_rho"), nullptr);
    EXPECT_TRUE(rep.find("f_below_rho")->pass);
}

TEST(ValidateHypotheses, ReactionAboveMajorantFails) {
    auto s = plateau();
    s.f = [](double, double, double) { return 1.0; };
    const auto rep = validate_hypotheses(s, derive_constants(s, 500), 500);
    EXPECT_FALSE(rep.find("f_below_rho")->pass);
    EXPECT_FALSE(rep.all_pass());
}

TEST(ValidateHypotheses, SquareAbsorptionHasInfiniteLogDerivative) {
    auto s = plateau();
    s.g = [](double w) { return w * w; };
    s.g_prime = [](double w) { return 2.0 * w; };
    DerivedConstants c;
    c.M = 1.0;
    c.Gamma = 1.0;
    c.gamma_low = 2.0;
    c.gM = 1.0;
    c.K1 = 4.0;
    c.eps0 = 0.02;
    const auto rep = validate_hypotheses(s, c, 1000);
    EXPECT_TRUE(rep.find("g_log_derivative_near_zero")->pass);
    EXPECT_GT(rep.find("g_log_derivative_near_zero")->worst_margin, 100.0);
}

TEST(ValidateHypotheses, OscillatingAbsorptionTouchesZero) {
    auto s = plateau();
    s.g = [](double w) { return w > 0.0 ? w * (1.0 + std::sin(1.0 / w)) : 0.0; };
    s.g_prime = nullptr;
    DerivedConstants c;
    c.M = 1.0;
    c.Gamma = 2.0;
    c.gamma_low = 1.0;
    c.gM = s.g(1.0);
    c.K1 = 4.0;
    c.eps0 = 0.01;
    const auto rep = validate_hypotheses(s, c, 2000);
    EXPECT_FALSE(rep.find("g_positive")->pass);
}

TEST(ValidateHypotheses, NegativeInitialDataFails) {
    auto s = plateau();
    s.u0 = [](double x) { return x - 0.5; };
    const auto rep = validate_hypotheses(s, derive_constants(s, 200), 200);
    EXPECT_FALSE(rep.find("u0_nonnegative")->pass);
    s.u0 = [](double) { return 0.0; };
    EXPECT_FALSE(validate_hypotheses(s, derive_constants(s, 200), 200).find("u0_not_identically_zero")->pass);
}

TEST(TransformSensitivity, IdentitySubstitution) {
    const auto tab = transform_sensitivity([](double) { return 1.0; }, [](double v) { return v; }, 2.0, 200);
    for (std::size_t k = 0; k < tab.w.size(); ++k) EXPECT_NEAR(tab.g[k], tab.w[k], 1e-6);
}

TEST(TransformSensitivity, RationalSubstitutionGivesLogistic) {
    const auto tab = transform_sensitivity([](double v) { return 1.0 / ((1.0 + v) * (1.0 + v)); },
                                           [](double v) { return v; }, 3.0, 400);
    EXPECT_NEAR(tab.w.back(), 3.0 / 4.0, 1e-8);
    for (std::size_t k = 0; k < tab.w.size(); ++k) EXPECT_NEAR(tab.g[k], tab.w[k] * (1.0 - tab.w[k]), 1e-6);
}

TEST(TransformSensitivity, LinearPsiGivesSquareRoot) {
    const auto tab = transform_sensitivity([](double v) { return 2.0 * v; }, [](double) { return 1.0; }, 1.0, 400);
    EXPECT_NEAR(tab.w.back(), 1.0, 1e-8);
    for (std::size_t k = 0; k < tab.w.size(); ++k) EXPECT_NEAR(tab.g[k], 2.0 * std::sqrt(tab.w[k]), 1e-6);
}

TEST(TransformSensitivity, FeedsTabulatedAbsorption) {
    const auto tab = transform_sensitivity([](double v) { return 1.0 / ((1.0 + v) * (1.0 + v)); },
                                           [](double v) { return v; }, 3.0, 400);
    const auto g = make_absorption(tab.to_formula());
    for (double w : {0.05, 0.3, 0.6}) EXPECT_NEAR(g.g(w), w * (1.0 - w), 1e-5);
}

TEST(TransformSensitivity, RejectsNegativePsi) {
    EXPECT_THROW(transform_sensitivity([](double v) { return 0.5 - v; }, [](double v) { return v; }, 1.0, 50), Error);
}

TEST(DegeneracyGeometry, PlateauEqualityCase) {
    const auto s = plateau();
    const double x[] = {0.3, 0.5, 0.7, 0.9};
    const double d[] = {s.d(0.3), s.d(0.5), s.d(0.7), s.d(0.9)};
    EXPECT_NEAR(d[3], 0.04, 1e-15);
    const auto rep = check_degeneracy_geometry(x, d, 4.0);
    EXPECT_FALSE(rep.no_degeneracy);
    EXPECT_NEAR(rep.ratio, 1.0, 1e-12);
}

TEST(DegeneracyGeometry, IdenticallyZero) {
    const auto xs = detail::nodes(0.0, 1.0, 100);
    const std::vector<double> d(xs.size(), 0.0);
    EXPECT_EQ(check_degeneracy_geometry(xs, d, 4.0).ratio, 0.0);
}

TEST(DegeneracyGeometry, SineSquared) {
    const auto xs = detail::nodes(0.0, 1.0, 2000);
    std::vector<double> d;
    for (double x : xs) d.push_back(std::sin(std::numbers::pi * x) * std::sin(std::numbers::pi * x));
    const double K1 = 4.0 * std::numbers::pi * std::numbers::pi;
    const auto rep = check_degeneracy_geometry(xs, d, K1, 1e-14);
    EXPECT_LE(rep.ratio, 1.0 + 1e-6);
    const double mid = 1.0 / (0.25 * K1 * 0.25);
    EXPECT_NEAR(mid, 0.405, 1e-3);
}

TEST(DegeneracyGeometry, NoZeroSet) {
    const auto xs = detail::nodes(0.0, 1.0, 10);
    const std::vector<double> d(xs.size(), 1.0);
    const auto rep = check_degeneracy_geometry(xs, d, 4.0);
    EXPECT_TRUE(rep.no_degeneracy);
    EXPECT_EQ(rep.ratio, 0.0);
}
