#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "gridfuse/cli/cli.hpp"
#include "gridfuse/cli/svg_plot.hpp"
#include "gridfuse/error.hpp"
#include "gridfuse/imputation.hpp"

namespace fs = std::filesystem;
using namespace gridfuse;
using namespace gridfuse::cli;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "gridfuse");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::size_t count(const std::string& s, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
    return n;
}

class CliFiles : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("gridfuse_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                            ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    fs::path dir_;
};

}  // namespace

TEST(Cli, VersionAndUsageErrors) {
    const auto v = run_cli({"--version"});
    EXPECT_EQ(v.code, cli::kExitOk);
    EXPECT_NE(v.out.find('.'), std::string::npos);
    EXPECT_EQ(run_cli({}).code, cli::kExitUserError);
    EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kExitUserError);
    EXPECT_EQ(run_cli({"generate"}).code, cli::kExitUserError);
    const auto h = run_cli({"--help"});
    EXPECT_EQ(h.code, cli::kExitOk);
    EXPECT_NE(h.out.find("impute"), std::string::npos);
}

TEST_F(CliFiles, GenerateImputePlotDsse) {
    ASSERT_EQ(run_cli({"generate", "--out", dir_.string(), "--seed", "3"}).code, cli::kExitOk);
    for (const char* f : {"meas.csv", "truth.csv", "train.csv"}) EXPECT_TRUE(fs::exists(dir_ / f)) << f;

    auto r = run_cli({"impute", "--data", path("meas.csv"), "--out", path("lin.csv"), "--method", "linear",
                      "--missing", "0.5"});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    const auto lin = read_imputed(fs::path(path("lin.csv")));
    ASSERT_FALSE(lin.empty());
    EXPECT_TRUE(lin[0].series.stddev.empty());

    r = run_cli({"impute", "--data", path("meas.csv"), "--out", path("gp.csv"), "--method", "gp", "--epochs", "1",
                 "--train-data", path("train.csv"), "--save-prior", path("prior.json")});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    EXPECT_TRUE(fs::exists(path("prior.json")));
    const auto gp = read_imputed(fs::path(path("gp.csv")));
    EXPECT_FALSE(gp.at(0).series.stddev.empty());

    r = run_cli({"impute", "--data", path("meas.csv"), "--out", path("gp2.csv"), "--prior", path("prior.json")});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    EXPECT_EQ(slurp(path("gp.csv")), slurp(path("gp2.csv")));

    r = run_cli({"plot", "--imputed", path("gp.csv"), "--task", gp[0].task_id, "--data", path("meas.csv"), "--truth",
                 path("truth.csv"), "--out", path("p.svg")});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    const auto svg = slurp(path("p.svg"));
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_EQ(count(svg, "<polyline"), 2u);
    EXPECT_EQ(count(svg, "class=\"band\""), 1u);
    EXPECT_GT(count(svg, "<circle"), 0u);
    EXPECT_EQ(run_cli({"plot", "--imputed", path("gp.csv"), "--task", "nope", "--out", path("q.svg")}).code,
              cli::kExitUserError);

    r = run_cli({"dsse", "--data", path("meas.csv"), "--imputed", path("lin.csv"), "--time", "43200", "--out",
                 path("states.csv"), "--observed-out", path("snap.csv")});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    const auto states = slurp(path("states.csv"));
    EXPECT_EQ(states.rfind("bus_id,re_v,im_v,v_mag,p_kw,q_kvar,consistency_residual", 0), 0u);
    EXPECT_EQ(count(states, "\n"), 38u);
    EXPECT_EQ(run_cli({"dsse", "--data", path("meas.csv"), "--time", "43200", "--fad", "1.5", "--out",
                       path("x.csv")})
                  .code,
              cli::kExitUserError);
}

TEST_F(CliFiles, RejectsBadValuesAndConfig) {
    ASSERT_EQ(run_cli({"generate", "--out", dir_.string()}).code, cli::kExitOk);
    const auto r = run_cli({"impute", "--data", path("meas.csv"), "--out", path("o.csv"), "--method", "bogus"});
    EXPECT_EQ(r.code, cli::kExitUserError);
    EXPECT_NE(r.err.find("bogus"), std::string::npos);
    EXPECT_FALSE(fs::exists(path("o.csv")));

    std::ofstream(path("bad.json")) << R"({"bogus": 1})";
    const auto c = run_cli({"--config", path("bad.json"), "sweep", "--trials", "1"});
    EXPECT_EQ(c.code, cli::kExitUserError);
    EXPECT_NE(c.err.find("bogus"), std::string::npos);

    EXPECT_EQ(run_cli({"--config", path("missing.json"), "generate", "--out", dir_.string()}).code,
              cli::kExitUserError);
    EXPECT_EQ(run_cli({"impute", "--data", path("nonexistent.csv"), "--out", path("o.csv")}).code,
              cli::kExitUserError);
}

TEST_F(CliFiles, ConfigFileSetsOptions) {
    std::ofstream(path("cfg.json")) << R"({"seed": 9, "noise": 0.0})";
    ASSERT_EQ(run_cli({"--config", path("cfg.json"), "generate", "--out", path("a")}).code, cli::kExitOk);
    ASSERT_EQ(run_cli({"generate", "--out", path("b"), "--seed", "9", "--noise", "0"}).code, cli::kExitOk);
    ASSERT_EQ(run_cli({"generate", "--out", path("c"), "--seed", "8", "--noise", "0"}).code, cli::kExitOk);
    EXPECT_EQ(slurp(path("a/meas.csv")), slurp(path("b/meas.csv")));
    EXPECT_NE(slurp(path("a/meas.csv")), slurp(path("c/meas.csv")));
}

TEST(SvgPlot, StructureAndDeterminism) {
    const std::vector<PlotSeries> series{{"a", {0, 3600, 7200}, {1, 1, 1}}, {"b", {0, 3600, 7200}, {2, 2, 2}}};
    const PlotBand band{"95% CI", {0, 3600, 7200}, {0.5, 0.5, 0.5}, {1.5, 1.5, 1.5}};
    const auto svg = emit_svg_plot(series, band, {});
    EXPECT_EQ(count(svg, "<polyline"), 2u);
    EXPECT_EQ(count(svg, "<path class=\"band\""), 1u);
    EXPECT_EQ(svg, emit_svg_plot(series, band, {}));
    EXPECT_LT(svg.find("class=\"band\""), svg.find("<polyline"));
    EXPECT_EQ(count(emit_svg_plot(series, std::nullopt, {}), "class=\"band\""), 0u);

    EXPECT_THROW(emit_svg_plot(std::vector<PlotSeries>{}, std::nullopt, {}), InvalidArgument);
    const std::vector<PlotSeries> ragged{{"a", {0, 1}, {1}}};
    EXPECT_THROW(emit_svg_plot(ragged, std::nullopt, {}), InvalidArgument);
    const std::vector<PlotSeries> nan{{"a", {0, 1}, {1, std::nan("")}}};
    EXPECT_THROW(emit_svg_plot(nan, std::nullopt, {}), InvalidArgument);
}
