#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "gridfuse/error.hpp"
#include "gridfuse/experiment.hpp"

using namespace gridfuse;

namespace {

ExperimentConfig tiny() {
    ExperimentConfig c;
    c.seed = 5;
    c.trials = 2;
    c.missing_fractions = {0.6};
    c.fads = {0.9};
    c.snapshot_step = 3600;
    c.training.epochs = 2;
    c.training.hidden = {4};
    return c;
}

}  // namespace

TEST(ExperimentConfig, Validation) {
    EXPECT_NO_THROW(ExperimentConfig{}.validate());
    auto bad = [](auto mutate) {
        ExperimentConfig c;
        mutate(c);
        EXPECT_THROW(c.validate(), InvalidArgument);
    };
    bad([](auto& c) { c.trials = 0; });
    bad([](auto& c) { c.missing_fractions = {1.0}; });
    bad([](auto& c) { c.fads = {0.0}; });
    bad([](auto& c) { c.grid_step = 7; });
    bad([](auto& c) { c.snapshot_step = 90; });
    bad([](auto& c) { c.methods = {ImputationMethod::Gp, ImputationMethod::Gp}; });
    bad([](auto& c) { c.methods.clear(); });
    bad([](auto& c) { c.ci_level = 1.0; });
    bad([](auto& c) { c.threads = -1; });
    bad([](auto& c) { c.completion.max_iters = 0; });
}

TEST(RunSweep, CellsPresentFiniteAndDeterministic) {
    auto cfg = tiny();
    const auto a = run_sweep(cfg);
    cfg.threads = 2;
    const auto b = run_sweep(cfg);
    EXPECT_EQ(a.to_csv(), b.to_csv());
    for (const char* m : {"gp", "linear"}) {
        for (const char* q : {"P_kW", "Q_kVAr"}) {
            const auto& c = a.at({m, q, "missing_fraction", 0.6, "rmse_percent"});
            EXPECT_EQ(c.per_trial.size(), 2u);
            EXPECT_TRUE(std::isfinite(c.value));
        }
        for (const char* q : {"P_kW", "Q_kVAr", "V_pu"}) EXPECT_TRUE(a.find({m, q, "fad", 0.9, "mae"}));
    }
    const auto& cov = a.at({"gp", "P_kW", "missing_fraction", 0.6, "ci_coverage"});
    EXPECT_GE(cov.value, 0.0);
    EXPECT_LE(cov.value, 1.0);
    EXPECT_FALSE(a.find({"linear", "P_kW", "missing_fraction", 0.6, "ci_coverage"}));

    auto other = tiny();
    other.seed = 6;
    EXPECT_NE(run_sweep(other).to_csv(), a.to_csv());
}

TEST(ImputationExperiment, LinearExactOnSampleGridWithoutNoise) {
    auto cfg = tiny();
    cfg.trials = 1;
    cfg.methods = {ImputationMethod::Linear};
    cfg.missing_fractions = {0.0};
    cfg.grid_step = 900;
    cfg.sampling.noise_relative = 0.0;
    const auto t = imputation_experiment(cfg);
    EXPECT_NEAR(t.at({"linear", "P_kW", "missing_fraction", 0.0, "rmse_percent"}).value, 0.0, 1e-12);
    EXPECT_NEAR(t.at({"linear", "Q_kVAr", "missing_fraction", 0.0, "rmse_percent"}).value, 0.0, 1e-12);
}

TEST(ImputationExperiment, NoMissingDataStaysNearNoiseFloor) {
    auto cfg = tiny();
    cfg.trials = 1;
    cfg.missing_fractions = {0.0, 0.6};
    const auto t = imputation_experiment(cfg);
    for (const char* m : {"gp", "linear"})
        EXPECT_LT(t.at({m, "P_kW", "missing_fraction", 0.0, "rmse_percent"}).value,
                  t.at({m, "P_kW", "missing_fraction", 0.6, "rmse_percent"}).value);
}

TEST(FadSweep, FullDataWithoutNoiseIsNearExact) {
    auto cfg = tiny();
    cfg.trials = 1;
    cfg.methods = {ImputationMethod::Linear};
    cfg.fads = {1.0};
    cfg.fad_missing_fraction = 0.0;
    cfg.grid_step = 900;
    cfg.snapshot_step = 7200;
    cfg.sampling.noise_relative = 0.0;
    cfg.completion.mu = 1e-8;
    cfg.completion.tol = 1e-12;
    cfg.completion.max_iters = 5000;
    const auto t = fad_sweep(cfg);
    EXPECT_LT(t.at({"linear", "V_pu", "fad", 1.0, "mae"}).value, 1e-3);
    EXPECT_LT(t.at({"linear", "P_kW", "fad", 1.0, "mae"}).value, 1e-3 * 100);
}

TEST(ResultTable, AggregatesAndRoundTrips) {
    ResultTable t;
    t.add({"gp", "P_kW", "missing_fraction", 0.6, "rmse_percent"}, {1.0, 2.0, 3.0});
    t.add({"linear", "P_kW", "missing_fraction", 0.6, "rmse_percent"}, {4.25});
    const auto& c = t.cells()[0];
    EXPECT_DOUBLE_EQ(c.value, 2.0);
    EXPECT_DOUBLE_EQ(c.trial_std, 1.0);
    EXPECT_EQ(t.cells()[1].trial_std, 0.0);
    EXPECT_THROW(t.add({"gp", "P_kW", "missing_fraction", 0.6, "rmse_percent"}, {1.0}), InvalidArgument);
    EXPECT_THROW(t.add({"g,p", "P_kW", "x", 0.6, "m"}, {1.0}), InvalidArgument);
    EXPECT_THROW(t.add({"gp", "P_kW", "x", 0.6, "m"}, {}), InvalidArgument);
    EXPECT_THROW(t.add({"gp", "P_kW", "x", 0.6, "m"}, {-1.0}), InvalidArgument);
    EXPECT_THROW(t.at({"none", "P_kW", "x", 0.6, "m"}), InvalidArgument);

    std::istringstream is(t.to_csv());
    const auto back = ResultTable::from_csv(is);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back.cells()[0].key, c.key);
    EXPECT_EQ(back.cells()[0].value, c.value);
    EXPECT_EQ(back.to_csv(), t.to_csv());

    const auto text = t.to_text();
    EXPECT_NE(text.find("rmse_percent"), std::string::npos);
    EXPECT_NE(text.find("4.25"), std::string::npos);

    std::istringstream bad(std::string(ResultTable::kCsvHeader) + "\ngp,P_kW,x,abc,m,1,0\n");
    try {
        ResultTable::from_csv(bad, "r.csv");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("2"), std::string::npos);
    }
}
