#include <gtest/gtest.h>

#include <Eigen/LU>
#include <cmath>
#include <filesystem>
#include <numbers>

#include "gp_fixtures.hpp"
#include "gridfuse/error.hpp"
#include "gridfuse/gp_model.hpp"
#include "gridfuse/prior_io.hpp"

using namespace gridfuse;
using namespace gridfuse::testing;

namespace {

/// Dense oracle: explicit inverse and determinant of the covariance built
/// entry by entry.
double lml_oracle(const GpPrior& prior, const TimeSeriesTask& task) {
    const auto n = static_cast<Eigen::Index>(task.size());
    const double l = std::exp(prior.kernel.log_lengthscale);
    const double s2 = std::exp(prior.kernel.log_signal_var);
    const double n2 = std::exp(prior.kernel.log_noise_var);
    Eigen::MatrixXd A(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const double d = (task[i].t - task[j].t) / prior.time_horizon / l;
            A(i, j) = s2 * std::exp(-0.5 * d * d) + (i == j ? n2 : 0.0);
        }
    const Eigen::VectorXd m = prior.mean_at(task, task.times());
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) r(i) = task[i].value - m(i);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    return -0.5 * r.dot(lu.inverse() * r) - 0.5 * std::log(lu.determinant()) -
           0.5 * static_cast<double>(n) * std::log(2 * std::numbers::pi);
}

double relative_error(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

}  // namespace

TEST(LogMarginalLikelihood, ScalarExamples) {
    const auto prior = zero_mean_prior(1.0, 1.0, 0.0);
    EXPECT_NEAR(log_marginal_likelihood(prior, task_of({0}, {0})), -0.9189385, 1e-7);
    EXPECT_NEAR(log_marginal_likelihood(prior, task_of({0}, {1})), -1.4189385, 1e-7);
}

TEST(LogMarginalLikelihood, MatchesDenseOracle) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto prior = GpPrior::make(InputEncoding::TimePlusTaskFeatures, seed);
        prior.bus_depth = {{"701", 0.25}};
        prior.kernel = KernelParams::from_values(0.15, 0.8, 0.05);
        const auto task = random_task(12, seed + 100);
        EXPECT_NEAR(log_marginal_likelihood(prior, task), lml_oracle(prior, task), 1e-9);
    }
}

TEST(LogMarginalLikelihood, SumOverTasks) {
    const auto prior = GpPrior::make(InputEncoding::TimeOnly, 3);
    std::vector<TimeSeriesTask> tasks{random_task(5, 1), random_task(9, 2), random_task(3, 3)};
    double sum = 0.0;
    for (const auto& t : tasks) sum += log_marginal_likelihood(prior, t);
    EXPECT_NEAR(log_marginal_likelihood(prior, tasks), sum, 1e-10);
}

TEST(LmlGradients, MatchCentralDifferences) {
    for (auto enc : {InputEncoding::TimeOnly, InputEncoding::TimePlusTaskFeatures}) {
        auto prior = GpPrior::make(enc, 17, {6, 5});
        prior.bus_depth = {{"701", 0.4}};
        prior.kernel = KernelParams::from_values(0.2, 1.3, 0.03);
        const std::vector<TimeSeriesTask> tasks{random_task(8, 5)};
        const auto g = lml_gradients(prior, tasks);
        EXPECT_NEAR(g.value, log_marginal_likelihood(prior, tasks), 1e-10);

        const auto p0 = prior.flatten();
        for (std::size_t k = 0; k < p0.size(); ++k) {
            const double h = 1e-5;
            auto plus = p0, minus = p0;
            plus[k] += h;
            minus[k] -= h;
            GpPrior a = prior, b = prior;
            a.assign(plus);
            b.assign(minus);
            const double fd = (log_marginal_likelihood(a, tasks) - log_marginal_likelihood(b, tasks)) / (2 * h);
            EXPECT_LT(relative_error(g.gradient[k], fd), 1e-4) << "parameter " << k;
        }
    }
}

TEST(LmlGradients, LinearOverTasks) {
    const auto prior = GpPrior::make(InputEncoding::TimeOnly, 2, {4});
    const std::vector<TimeSeriesTask> a{random_task(6, 1)}, b{random_task(4, 2)};
    const std::vector<TimeSeriesTask> both{a[0], b[0]};
    const auto ga = lml_gradients(prior, a), gb = lml_gradients(prior, b), g = lml_gradients(prior, both);
    for (std::size_t k = 0; k < g.gradient.size(); ++k)
        EXPECT_NEAR(g.gradient[k], ga.gradient[k] + gb.gradient[k], 1e-9 * (1 + std::abs(g.gradient[k])));
}

TEST(PosteriorPredict, NoiselessSingleObservation) {
    const auto prior = zero_mean_prior(1.0, 1.0, 0.0);
    const auto obs = task_of({0.0}, {1.0});
    const std::vector<double> q{0.0, 1.0};
    const auto pred = posterior_predict(prior, obs, q);
    EXPECT_NEAR(pred.mean[0], 1.0, 1e-12);
    EXPECT_NEAR(pred.variance[0], 0.0, 1e-12);
    EXPECT_NEAR(pred.mean[1], std::exp(-0.5), 1e-10);
    EXPECT_NEAR(pred.variance[1], 1.0 - std::exp(-1.0), 1e-10);
}

TEST(PosteriorPredict, EmptyObservationGivesPrior) {
    auto prior = GpPrior::make(InputEncoding::TimeOnly, 4);
    prior.kernel = KernelParams::from_values(0.1, 2.0, 0.5);
    const TimeSeriesTask empty = task_of({}, {});
    const std::vector<double> q{0, 3600, 50000};
    const auto pred = posterior_predict(prior, empty, q);
    const auto m = prior.mean_at(empty, q);
    for (std::size_t i = 0; i < q.size(); ++i) {
        EXPECT_DOUBLE_EQ(pred.mean[i], m(static_cast<Eigen::Index>(i)));
        EXPECT_DOUBLE_EQ(pred.variance[i], 2.0);
    }
    EXPECT_DOUBLE_EQ(posterior_predict(prior, empty, q, true).variance[0], 2.5);
}

TEST(PosteriorPredict, InformationNeverHurtsProperty) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto prior = GpPrior::make(InputEncoding::TimeOnly, seed);
        prior.kernel = KernelParams::from_values(0.05, 1.5, 0.01);
        const auto obs = random_task(20, seed);
        const auto q = TimeGrid::day(600).instants();
        for (bool noise : {false, true}) {
            const auto pred = posterior_predict(prior, obs, q, noise);
            for (double v : pred.variance) EXPECT_LE(v, 1.5 + (noise ? 0.01 : 0.0) + 1e-10);
        }
    }
}

TEST(PosteriorPredict, NoiselessInterpolatesObservations) {
    auto prior = GpPrior::make(InputEncoding::TimeOnly, 6);
    prior.kernel = KernelParams::from_values(0.05, 1.0, 0.0);
    std::vector<double> t, v;
    for (int i = 0; i < 12; ++i) {
        t.push_back(3600.0 * 2 * i);
        v.push_back(std::cos(i * 0.7));
    }
    const auto obs = task_of(t, v);
    const auto pred = posterior_predict(prior, obs, t);
    for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(pred.mean[i], v[i], 1e-8);
}

TEST(PosteriorPredict, RevertsToPriorFarFromData) {
    auto prior = GpPrior::make(InputEncoding::TimeOnly, 8);
    prior.kernel = KernelParams::from_values(0.01, 1.2, 0.02);
    const auto obs = task_of({0, 300, 600}, {1.0, 2.0, 1.5});
    const std::vector<double> q{0.01 * 86400 * 12, 0.01 * 86400 * 40};  // >= 10 l away
    const auto pred = posterior_predict(prior, obs, q);
    const auto m = prior.mean_at(obs, q);
    for (std::size_t i = 0; i < q.size(); ++i) {
        EXPECT_NEAR(pred.mean[i], m(static_cast<Eigen::Index>(i)), 1e-6);
        EXPECT_NEAR(pred.variance[i], 1.2, 1e-6);
    }
}

TEST(ConfidenceInterval, Examples) {
    PosteriorPrediction p;
    p.mean = {0.0, 3.0};
    p.variance = {1.0, 0.0};
    const auto ci = confidence_interval(p, 0.95);
    EXPECT_NEAR(ci[0].lower, -1.959964, 1e-6);
    EXPECT_NEAR(ci[0].upper, 1.959964, 1e-6);
    EXPECT_EQ(ci[1].lower, 3.0);
    EXPECT_EQ(ci[1].upper, 3.0);
    const auto wide = confidence_interval(p, 0.99);
    EXPECT_LT(wide[0].lower, ci[0].lower);
    EXPECT_GT(wide[0].upper, ci[0].upper);
    EXPECT_THROW(confidence_interval(p, 1.0), InvalidArgument);
    EXPECT_THROW(confidence_interval(p, 0.0), InvalidArgument);
}

TEST(GpPrior, EncodingLayout) {
    auto prior = GpPrior::make(InputEncoding::TimePlusTaskFeatures, 1);
    prior.bus_depth = {{"702", 0.5}};
    const auto task = task_of({43200}, {0}, Quantity::ReactivePower_kVAr, "702");
    const std::vector<double> t{43200};
    const auto X = prior.mean_inputs(task, t);
    ASSERT_EQ(X.cols(), 5);
    EXPECT_DOUBLE_EQ(X(0, 0), 0.5);
    EXPECT_EQ(X(0, 1), 0.0);
    EXPECT_EQ(X(0, 2), 1.0);
    EXPECT_EQ(X(0, 3), 0.0);
    EXPECT_EQ(X(0, 4), 0.5);
    EXPECT_EQ(GpPrior::input_dim(InputEncoding::TimeOnly), 1);
}

TEST(PriorIo, JsonRoundTripIsExact) {
    auto prior = GpPrior::make(InputEncoding::TimePlusTaskFeatures, 21, {7, 3});
    prior.bus_depth = {{"701", 0.125}, {"799", 0.0}};
    prior.kernel = KernelParams::from_values(0.0731, 0.6, 0.0);  // -inf log noise
    const auto back = prior_from_json(prior_to_json(prior));
    EXPECT_EQ(back.encoding, prior.encoding);
    EXPECT_EQ(back.time_horizon, prior.time_horizon);
    EXPECT_EQ(back.bus_depth, prior.bus_depth);
    EXPECT_EQ(back.mean.layer_dims(), prior.mean.layer_dims());
    EXPECT_EQ(back.flatten(), prior.flatten());
    EXPECT_TRUE(std::isinf(back.kernel.log_noise_var));
}

TEST(PriorIo, FileRoundTripAndErrors) {
    const auto dir = std::filesystem::temp_directory_path() / "gridfuse_prior_io";
    std::filesystem::create_directories(dir);
    const auto prior = GpPrior::make(InputEncoding::TimeOnly, 2, {4});
    save_prior(prior, dir / "p.json");
    EXPECT_EQ(load_prior(dir / "p.json").flatten(), prior.flatten());
    EXPECT_THROW(prior_from_json("{\"format_version\": 99}"), ParseError);
    EXPECT_THROW(prior_from_json("not json"), ParseError);
    EXPECT_ANY_THROW(load_prior(dir / "missing.json"));
    std::filesystem::remove_all(dir);
}
