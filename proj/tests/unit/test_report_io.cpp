#include <gtest/gtest.h>

#include "haptosim/report_io.hpp"

using namespace haptosim;

TEST(Csv, RoundTripThroughParser) {
    const Grid1D g(0.0, 1.0, 4);
    RunResult r;
    r.snapshots.push_back({0.0, {1.0, 2.0, 3.0, 4.0}, {0.1, 0.2, 0.3, 0.4}});
    r.snapshots.push_back({0.5, {1.5, 2.5, 3.5, 4.5}, {0.05, 0.1, 0.15, 0.2}});
    const auto t = parse_csv(snapshots_csv(r, g));
    EXPECT_EQ(t.header, (std::vector<std::string>{"t", "x", "u", "w"}));
    ASSERT_EQ(t.rows.size(), 8u);
    EXPECT_DOUBLE_EQ(t.values("u")[5], 2.5);
    EXPECT_DOUBLE_EQ(t.values("x")[3], 0.875);
    EXPECT_THROW(t.column("nope"), Error);
}

TEST(Csv, FullPrecision) {
    RunResult r;
    StepRecord s;
    s.t = 0.1;
    s.mass = 1.0 / 3.0;
    r.series.push_back(s);
    EXPECT_DOUBLE_EQ(parse_csv(series_csv(r)).values("mass")[0], 1.0 / 3.0);
}

TEST(Csv, SweepRowsAndRagged) {
    SweepRow row;
    row.eps = 1e-3;
    row.within_gate = true;
    const auto t = parse_csv(sweep_csv({row}));
    EXPECT_EQ(t.header.size(), 16u);
    EXPECT_EQ(t.values("within_gate")[0], 1.0);
    EXPECT_TRUE(std::isnan(t.values("cauchy_u")[0]));
    EXPECT_THROW(parse_csv("a,b\n1\n"), Error);
    EXPECT_TRUE(parse_csv("").header.empty());
}

TEST(Files, WriteAndRead) {
    const auto dir = std::filesystem::temp_directory_path() / "haptosim_io_test";
    std::filesystem::remove_all(dir);
    write_file(dir / "nested" / "f.txt", "abc\n");
    EXPECT_EQ(read_file(dir / "nested" / "f.txt"), "abc\n");
    EXPECT_THROW(read_file(dir / "missing.txt"), Error);
    std::filesystem::remove_all(dir);
}

TEST(Svg, WellFormedAndSkipsNonFinite) {
    const auto svg = svg_plot("m", "t", "y", {{"a", {0.0, 1.0, 2.0}, {1.0, NAN, 3.0}}, {"b", {}, {}}});
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
    EXPECT_EQ(svg.find("nan"), std::string::npos);
    EXPECT_EQ(std::count(svg.begin(), svg.end(), '\n') > 5, true);
}
