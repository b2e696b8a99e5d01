#include "cat0/cli.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace cat0;

TEST(Config, ParsesKeysAndComments)
{
    auto c = ScenarioConfig::parse_string(
        "# flat run\n"
        "scenario = reconstruct_flat\n"
        "space = tree_cross_line\n"
        "mode = float\n"
        "tree = line 3 1/2\n"
        "tolerance = 1e-7\n"
        "seed = 42\n"
        "cases = 3\n"
        "plots = tape, error_curve\n"
        "timing = on\n");
    EXPECT_EQ(c.scenario, Scenario::reconstruct_flat);
    EXPECT_EQ(c.space, SpaceKind::tree_cross_line);
    EXPECT_EQ(c.mode, NumericMode::float_with_tolerance);
    EXPECT_EQ(c.tree, "line 3 1/2");
    EXPECT_DOUBLE_EQ(c.tolerance, 1e-7);
    EXPECT_EQ(c.seed, 42u);
    EXPECT_EQ(c.cases, 3);
    ASSERT_EQ(c.plots.size(), 2u);
    EXPECT_EQ(c.plots[1], "error_curve");
    EXPECT_TRUE(c.timing);
    EXPECT_EQ(c.make_space()->kind(), SpaceKind::tree_cross_line);
}

TEST(Config, MalformedInputs)
{
    EXPECT_THROW(ScenarioConfig::parse_string("scenario reconstruct_flat\n"), ConfigError);
    EXPECT_THROW(ScenarioConfig::parse_string("colour = blue\n"), ConfigError);
    EXPECT_THROW(ScenarioConfig::parse_string("scenario = bake\n"), ConfigError);
    EXPECT_THROW(ScenarioConfig::parse_string("space = sphere\n"), ConfigError);
    EXPECT_THROW(ScenarioConfig::parse_string("tolerance = -1\n"), ConfigError);
    EXPECT_THROW(ScenarioConfig::parse_string("cases = 3x\n"), ConfigError);
    EXPECT_THROW(ScenarioConfig::parse_string("plots = teapot\n"), ConfigError);
    EXPECT_THROW(ScenarioConfig::parse_string("timing = maybe\n"), ConfigError);
    auto c = ScenarioConfig::parse_string("space = tree\ntree = cube 1\n");
    EXPECT_THROW(c.make_space(), ConfigError);
}

TEST(Report, PropertiesRunIsDeterministic)
{
    auto c = ScenarioConfig::parse_string("scenario = verify_properties\nseed = 5\ncases = 2\n");
    Report a = run(c), b = run(c);
    EXPECT_EQ(a.dump(), b.dump());
    EXPECT_TRUE(a.passed()) << a.dump();
    EXPECT_EQ(a.data["suites"].size(), 6u);
    EXPECT_EQ(a.data["config"]["seed"], 5);
}

TEST(Report, FlatCasesCarryRecomputableErrors)
{
    auto c = ScenarioConfig::parse_string("scenario = reconstruct_flat\nspace = euclidean\ncases = 4\nseed = 3\n");
    Report r = run(c);
    ASSERT_EQ(r.data["cases"].size(), 4u);
    for (const auto& rec : r.data["cases"]) {
        double e = std::abs(rec["reconstructed"].get<double>() - rec["ground_truth"].get<double>());
        EXPECT_DOUBLE_EQ(rec["error"].get<double>(), e);
        EXPECT_GT(rec["oracle_calls"].get<std::uint64_t>(), 0u);
        EXPECT_EQ(rec["wall_time_s"].get<double>(), 0.0);
    }
    EXPECT_TRUE(r.passed()) << r.dump();
}

TEST(Report, WrongSpaceIsAConfigError)
{
    auto c = ScenarioConfig::parse_string("scenario = reconstruct_rankone\nspace = euclidean\n");
    EXPECT_THROW(run(c), ConfigError);
}

TEST(Plot, AbsentGeometryThrows)
{
    Report empty;
    std::ostringstream out;
    EXPECT_THROW(emit_plot_data(empty, "tape", out), std::runtime_error);
    EXPECT_THROW(emit_plot_data(empty, "hologram", out), std::invalid_argument);
}

TEST(Plot, TapeRowsRoundTrip)
{
    auto c = ScenarioConfig::parse_string("scenario = tape_demo\ntape_order = 2\nwindow = 2\n");
    Report r = run(c);
    EXPECT_TRUE(r.passed()) << r.dump();
    std::ostringstream out;
    emit_plot_data(r, "tape", out);
    std::istringstream in(out.str());
    std::string line;
    int count = 0;
    std::getline(in, line);
    EXPECT_EQ(line, "i,j,z,u,v");
    while (std::getline(in, line)) ++count;
    EXPECT_EQ(count, 4 * 2 * 5);
}
