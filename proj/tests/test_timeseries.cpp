#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "gridfuse/error.hpp"
#include "gridfuse/timeseries.hpp"

using namespace gridfuse;

namespace {

TimeSeriesTask make_task(std::vector<double> t, std::vector<double> v, Quantity q = Quantity::ActivePower_kW) {
    return TimeSeriesTask("701.P", "701", Phase::A, q, std::move(t), std::move(v));
}

TimeSeriesTask ami_day(std::size_t n = 96) {
    std::vector<double> t, v;
    for (std::size_t i = 0; i < n; ++i) {
        t.push_back(900.0 * static_cast<double>(i));
        v.push_back(std::sin(0.1 * static_cast<double>(i)));
    }
    return make_task(t, v);
}

}  // namespace

TEST(TimeSeriesTask, RejectsInvalidSamples) {
    EXPECT_THROW(make_task({0, 0}, {1, 2}), InvalidArgument);
    EXPECT_THROW(make_task({10, 5}, {1, 2}), InvalidArgument);
    EXPECT_THROW(make_task({0, 1}, {1}), InvalidArgument);
    EXPECT_THROW(make_task({0}, {NAN}), InvalidArgument);
    EXPECT_NO_THROW(make_task({}, {}));
}

TEST(TimeGrid, DayGridRequiresDivisor) {
    EXPECT_EQ(TimeGrid::day(60).count(), 1440u);
    EXPECT_EQ(TimeGrid::day(900).count(), 96u);
    EXPECT_DOUBLE_EQ(TimeGrid::day(900).end(), 85500.0);
    EXPECT_THROW(TimeGrid::day(7), InvalidArgument);
    EXPECT_THROW(TimeGrid::day(0), InvalidArgument);
}

TEST(Missingness, KeptCounts) {
    const auto task = ami_day();
    EXPECT_EQ(apply_missingness(task, 0.0, 7).first.size(), 96u);
    EXPECT_EQ(apply_missingness(task, 0.6, 7).first.size(), 38u);
    EXPECT_EQ(kept_count(96, 0.6), 38u);
    EXPECT_EQ(kept_count(96, 0.1), 86u);
}

TEST(Missingness, RejectsBadInput) {
    EXPECT_THROW(apply_missingness(ami_day(), 1.0, 1), InvalidArgument);
    EXPECT_THROW(apply_missingness(ami_day(), -0.1, 1), InvalidArgument);
    EXPECT_THROW(apply_missingness(make_task({}, {}), 0.5, 1), InvalidArgument);
}

TEST(Missingness, DeterministicOrderedAndNested) {
    const auto task = ami_day();
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto [a, ma] = apply_missingness(task, 0.6, seed);
        const auto [b, mb] = apply_missingness(task, 0.6, seed);
        EXPECT_EQ(ma.kept_indices, mb.kept_indices);
        EXPECT_TRUE(std::is_sorted(ma.kept_indices.begin(), ma.kept_indices.end()));
        EXPECT_EQ(std::adjacent_find(ma.kept_indices.begin(), ma.kept_indices.end()), ma.kept_indices.end());
        for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].t, task[ma.kept_indices[i]].t);

        const auto smaller = apply_missingness(task, 0.2, seed).second.kept_indices;
        EXPECT_TRUE(std::includes(smaller.begin(), smaller.end(), ma.kept_indices.begin(), ma.kept_indices.end()));
    }
}

TEST(LinearInterpolate, Examples) {
    const std::vector<double> q60{60.0};
    EXPECT_DOUBLE_EQ(linear_interpolate(make_task({0, 120}, {0, 2}), q60)[0], 1.0);
    const std::vector<double> q300{300.0};
    EXPECT_DOUBLE_EQ(linear_interpolate(make_task({0}, {5}), q300)[0], 5.0);
    EXPECT_THROW(linear_interpolate(make_task({}, {}), q60), NoDataError);
}

TEST(LinearInterpolate, HoldsBeyondSpan) {
    const auto task = make_task({100, 200}, {1, 3});
    const std::vector<double> q{0, 50, 250, 1000};
    const auto v = linear_interpolate(task, q);
    EXPECT_EQ(v, (std::vector<double>{1, 1, 3, 3}));
}

TEST(LinearInterpolate, ReproducesAffineFunctionsProperty) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const double a = std::uniform_real_distribution<double>(-5, 5)(rng);
        const double b = std::uniform_real_distribution<double>(-100, 100)(rng);
        const auto full = TimeGrid::day(900).instants();
        std::vector<double> t, v;
        for (double x : full)
            if (rng() % 3 == 0 || x == 0.0 || x == full.back()) {
                t.push_back(x);
                v.push_back(a * x / 3600.0 + b);
            }
        const auto task = make_task(t, v);
        const auto grid = TimeGrid(0, 60, 1426);  // inside [0, 85500]
        const auto out = linear_interpolate(task, grid);
        for (std::size_t i = 0; i < grid.count(); ++i)
            EXPECT_NEAR(out[i], a * grid.at(i) / 3600.0 + b, 1e-12 * (1 + std::abs(b) + std::abs(a) * 24));
        for (std::size_t i = 0; i < task.size(); ++i) {
            const std::vector<double> q{task[i].t};
            EXPECT_EQ(linear_interpolate(task, q)[0], task[i].value);
        }
    }
}

TEST(Standardize, Examples) {
    {
        const auto [z, s] = standardize_task(make_task({0, 1, 2}, {1, 1, 1}));
        EXPECT_EQ(s.mean, 1.0);
        EXPECT_EQ(s.stddev, 1.0);
        for (double v : z.values()) EXPECT_EQ(v, 0.0);
    }
    {
        const auto [z, s] = standardize_task(make_task({0, 1}, {0, 2}));
        EXPECT_DOUBLE_EQ(s.mean, 1.0);
        EXPECT_DOUBLE_EQ(s.stddev, 1.0);
        EXPECT_DOUBLE_EQ(z.values()[0], -1.0);
        EXPECT_DOUBLE_EQ(z.values()[1], 1.0);
    }
}

TEST(Standardize, RoundTripProperty) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> t, v;
        const int n = 1 + static_cast<int>(rng() % 30);
        for (int i = 0; i < n; ++i) {
            t.push_back(i);
            v.push_back(u(rng));
        }
        const auto task = make_task(t, v);
        const auto [z, s] = standardize_task(task);
        const auto back = destandardize_task(z, s);
        for (int i = 0; i < n; ++i)
            EXPECT_LE(std::abs(back.values()[i] - v[i]), 1e-12 * std::max(1.0, std::abs(v[i])));
    }
}

TEST(NormalizeTime, Examples) {
    EXPECT_DOUBLE_EQ(normalize_time(43200, 86400), 0.5);
    EXPECT_DOUBLE_EQ(normalize_time(0, 86400), 0.0);
    EXPECT_DOUBLE_EQ(normalize_time(86400, 86400), 1.0);
    EXPECT_THROW(normalize_time(1, 0), InvalidArgument);
}

TEST(Quantity, CsvSpellings) {
    for (auto q : {Quantity::ActivePower_kW, Quantity::ReactivePower_kVAr, Quantity::VoltageMag_pu})
        EXPECT_EQ(parse_quantity(to_string(q)), q);
    EXPECT_FALSE(parse_quantity("kW").has_value());
    EXPECT_EQ(parse_phase("B"), Phase::B);
}
