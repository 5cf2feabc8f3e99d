#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "haptosim/config.hpp"

using namespace haptosim;

namespace {

ErrorKind kind_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error for:\n" << text;
    return ErrorKind::Io;
}

std::string message_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST(Config, EmptyFileGivesDefaults) {
    const auto c = parse_config("");
    EXPECT_EQ(c, RunConfig{});
    EXPECT_EQ(c.discretization.n, 200u);
    EXPECT_DOUBLE_EQ(c.discretization.controls.cfl, 0.45);
    EXPECT_DOUBLE_EQ(c.schedule.A, std::exp(std::numbers::e));
    EXPECT_EQ(c.schedule.epsilons(), (std::vector<double>{1e-2, 1e-3, 1e-4}));
    EXPECT_EQ(c.experiment.times().size(), 201u);
}

TEST(Config, ParsesEveryBlock) {
    const auto c = parse_config(
        "# comment\n"
        "[problem]\n d = sin2 1   # trailing\n f = bilinear 1 -1 0 0\n delta = 0.3\n"
        "[discretization]\n n = 64\n theta_w = off\n"
        "[schedule]\n eps_list = 1e-2, 5e-3, 1e-3\n"
        "[experiment]\n T = 0.5\n output_times = 0, 0.25, 0.5\n"
        "[output]\n directory = out/x\n plots = false\n seed = 7\n");
    EXPECT_EQ(c.problem.d.tag, "sin2");
    EXPECT_EQ(c.problem.f.params, (std::vector<double>{1, -1, 0, 0}));
    EXPECT_EQ(c.discretization.n, 64u);
    EXPECT_FALSE(c.discretization.controls.theta_w);
    EXPECT_EQ(c.schedule.eps_list, (std::vector<double>{1e-2, 5e-3, 1e-3}));
    EXPECT_EQ(c.experiment.times(), (std::vector<double>{0.0, 0.25, 0.5}));
    EXPECT_EQ(c.output.directory, "out/x");
    EXPECT_FALSE(c.output.plots);
    EXPECT_EQ(c.output.seed, 7u);
}

TEST(Config, GeometricSchedule) {
    const auto c = parse_config("[schedule]\nbase = 0.01\nratio = 0.5\ncount = 4\n");
    const auto e = c.schedule.epsilons();
    ASSERT_EQ(e.size(), 4u);
    EXPECT_DOUBLE_EQ(e[3], 0.00125);
    EXPECT_EQ(kind_of("[schedule]\nbase = 0.01\neps_list = 0.1\n"), ErrorKind::InvalidValue);
}

TEST(Config, Errors) {
    EXPECT_EQ(kind_of("[schedule]\neps_list = 1e-3, 1e-2\n"), ErrorKind::InvalidValue);
    EXPECT_EQ(kind_of("[problem]\nfoo = 1\n"), ErrorKind::UnknownKey);
    EXPECT_EQ(kind_of("[nowhere]\n"), ErrorKind::UnknownKey);
    EXPECT_EQ(kind_of("n = 4\n"), ErrorKind::ParseError);
    EXPECT_EQ(kind_of("[problem\n"), ErrorKind::ParseError);
    EXPECT_EQ(kind_of("[problem]\njust words\n"), ErrorKind::ParseError);
    EXPECT_EQ(kind_of("[problem]\ndelta = 0.1\ndelta = 0.2\n"), ErrorKind::ParseError);
    EXPECT_EQ(kind_of("[problem]\ndelta = abc\n"), ErrorKind::InvalidValue);
    EXPECT_EQ(kind_of("[problem]\ndelta = -1\n"), ErrorKind::InvalidValue);
    EXPECT_EQ(kind_of("[problem]\nd = nosuch 1\n"), ErrorKind::InvalidValue);
    EXPECT_EQ(kind_of("[discretization]\nn = -3\n"), ErrorKind::InvalidValue);
    EXPECT_EQ(kind_of("[discretization]\ntheta_w = maybe\n"), ErrorKind::InvalidValue);
    EXPECT_EQ(kind_of("[schedule]\nA = 2\n"), ErrorKind::InvalidValue);
    EXPECT_EQ(kind_of("[experiment]\noutput_times = 0, 2\n"), ErrorKind::InvalidValue);
    EXPECT_EQ(kind_of("[experiment]\noutput_times = 0, 1\noutput_count = 3\n"), ErrorKind::InvalidValue);
}

TEST(Config, ErrorsCarryLineNumbers) {
    EXPECT_NE(message_of("\n\n[problem]\nfoo = 1\n").find("line 4"), std::string::npos);
    EXPECT_NE(message_of("[schedule]\n\neps_list = 0.1, 0.2\n").find("line 3"), std::string::npos);
    EXPECT_NE(message_of("[problem]\ndelta = x\n").find("line 2"), std::string::npos);
}

TEST(Config, RandomizedRoundTrip) {
    std::mt19937_64 rng(20261014);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        RunConfig c;
        c.problem.a = -unit(rng);
        c.problem.b = 1.0 + unit(rng);
        c.problem.delta = 0.05 + unit(rng);
        c.problem.u0 = {"cosine", {1.0 + unit(rng), unit(rng), 1.0 + std::floor(3.0 * unit(rng))}};
        c.problem.d = {"plateau", {0.5 * (c.problem.a + c.problem.b), 0.1 * unit(rng)}};
        c.discretization.n = 4 + static_cast<std::size_t>(1000 * unit(rng));
        c.discretization.controls.cfl = 0.01 + 0.9 * unit(rng);
        c.discretization.controls.dt_max = 1e-4 + unit(rng);
        c.discretization.controls.theta_w = unit(rng) < 0.5;
        if (unit(rng) < 0.5) {
            c.schedule.geometric = GeometricSchedule{0.5 * unit(rng) + 1e-3, 0.9 * unit(rng) + 0.05, 1 + static_cast<std::size_t>(5 * unit(rng))};
        } else {
            c.schedule.eps_list.clear();
            double e = 0.9 * unit(rng) + 1e-3;
            for (int k = 0; k < 1 + trial % 4; ++k, e *= 0.3 * unit(rng) + 0.1) c.schedule.eps_list.push_back(e);
        }
        c.schedule.A = kDefaultA * (1.0 + unit(rng));
        c.experiment.T = 0.1 + 3.0 * unit(rng);
        if (trial % 3 == 0) c.experiment.output_times = {0.0, c.experiment.T * unit(rng), c.experiment.T};
        else c.experiment.output_count = 2 + static_cast<std::size_t>(300 * unit(rng));
        c.experiment.d_floor = unit(rng);
        c.experiment.battery_size = 1 + trial % 6;
        c.output.directory = "out/run" + std::to_string(trial);
        c.output.plots = trial % 2 == 0;
        c.output.seed = rng();
        const auto text = render_config(c);
        EXPECT_EQ(parse_config(text), c) << text;
    }
}

TEST(Config, ShippedConfigsParse) {
    for (const char* name : {"plateau.cfg", "logistic.cfg"}) {
        std::ifstream is(std::string(HAPTOSIM_SOURCE_DIR) + "/configs/" + name);
        ASSERT_TRUE(is) << name;
        std::stringstream ss;
        ss << is.rdbuf();
        EXPECT_NO_THROW(parse_config(ss.str())) << name;
    }
}

TEST(Config, MakeProblemMatchesDefaults) {
    const auto s = make_problem(ProblemBlock{});
    EXPECT_DOUBLE_EQ(s.d(0.5), 0.0);
    EXPECT_NEAR(s.d(0.0), 0.09, 1e-15);
    EXPECT_NEAR(s.u0(0.0), 1.5, 1e-15);
    EXPECT_NEAR(s.w0(1.0), 0.2, 1e-15);
    EXPECT_DOUBLE_EQ(s.g(0.3), 0.3);
}
