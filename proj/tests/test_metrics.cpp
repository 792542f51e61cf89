#include <gtest/gtest.h>

#include <random>

#include "gridfuse/error.hpp"
#include "gridfuse/metrics.hpp"

using namespace gridfuse;

TEST(RmsePercent, Examples) {
    const std::vector<double> t{10, 10, 10, 10};
    EXPECT_EQ(rmse_percent(t, t), 0.0);
    EXPECT_NEAR(rmse_percent(t, std::vector<double>{11, 11, 11, 11}), 10.0, 1e-12);
    EXPECT_NEAR(rmse_percent(t, std::vector<double>{12, 8, 12, 8}), 20.0, 1e-12);
}

TEST(RmsePercent, ScaleInvariant) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n(3.0, 1.0);
    std::vector<double> a(50), b(50), a2, b2;
    for (std::size_t i = 0; i < 50; ++i) {
        a[i] = n(rng);
        b[i] = n(rng);
        a2.push_back(-250.0 * a[i]);
        b2.push_back(-250.0 * b[i]);
    }
    EXPECT_NEAR(rmse_percent(a, b), rmse_percent(a2, b2), 1e-10);
}

TEST(RmsePercent, Errors) {
    const std::vector<double> a{1, 2}, b{1};
    EXPECT_THROW(rmse_percent(a, b), InvalidArgument);
    EXPECT_THROW(rmse_percent(std::vector<double>{}, std::vector<double>{}), InvalidArgument);
    EXPECT_THROW(rmse_percent(std::vector<double>{0, 0}, std::vector<double>{1, 1}), InvalidArgument);
}

TEST(MeanAbsoluteError, ExamplesAndSymmetry) {
    const std::vector<double> a{1, 2, 3}, b{2, 2, 1};
    EXPECT_NEAR(mean_absolute_error(a, b), 1.0, 1e-15);
    EXPECT_EQ(mean_absolute_error(a, b), mean_absolute_error(b, a));
    EXPECT_EQ(mean_absolute_error(a, a), 0.0);
    EXPECT_THROW(mean_absolute_error(a, std::vector<double>{1}), InvalidArgument);
}

TEST(CiCoverage, Examples) {
    PosteriorPrediction p;
    p.mean = {0, 0, 0};
    p.variance = {1, 1, 1};
    EXPECT_EQ(ci_coverage(std::vector<double>{0, 1, -1.9}, p, 0.95), 1.0);
    EXPECT_EQ(ci_coverage(std::vector<double>{5, -5, 2.5}, p, 0.95), 0.0);
    EXPECT_THROW(ci_coverage(std::vector<double>{0}, p, 0.95), InvalidArgument);
}

TEST(CiCoverage, CalibratedGaussianNearNominal) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n(0.0, 1.0);
    const std::size_t N = 40000;
    PosteriorPrediction p;
    std::vector<double> truth;
    for (std::size_t i = 0; i < N; ++i) {
        const double mu = 10.0 * n(rng), sd = 0.1 + std::abs(n(rng));
        p.mean.push_back(mu);
        p.variance.push_back(sd * sd);
        truth.push_back(mu + sd * n(rng));
    }
    const double c = ci_coverage(truth, p, 0.95);
    EXPECT_GE(c, 0.94);
    EXPECT_LE(c, 0.96);
}
