#include <benchmark/benchmark.h>

#include <random>

#include "gridfuse/feeder.hpp"
#include "gridfuse/gp_model.hpp"
#include "gridfuse/matrix_completion.hpp"
#include "gridfuse/rng.hpp"

using namespace gridfuse;

namespace {

TimeSeriesTask make_task(std::size_t n) {
    std::vector<double> t, v;
    for (std::size_t i = 0; i < n; ++i) {
        t.push_back(86400.0 * static_cast<double>(i) / static_cast<double>(n));
        v.push_back(std::sin(6.283 * static_cast<double>(i) / static_cast<double>(n)));
    }
    return TimeSeriesTask("701.P", "701", Phase::A, Quantity::ActivePower_kW, t, v);
}

void BM_LogMarginalLikelihood(benchmark::State& state) {
    const auto prior = GpPrior::make(InputEncoding::TimePlusTaskFeatures, 1);
    const auto task = make_task(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(log_marginal_likelihood(prior, task));
}
BENCHMARK(BM_LogMarginalLikelihood)->Arg(38)->Arg(96)->Arg(240);

void BM_LmlGradients(benchmark::State& state) {
    const auto prior = GpPrior::make(InputEncoding::TimePlusTaskFeatures, 1);
    const std::vector<TimeSeriesTask> tasks{make_task(static_cast<std::size_t>(state.range(0)))};
    for (auto _ : state) benchmark::DoNotOptimize(lml_gradients(prior, tasks));
}
BENCHMARK(BM_LmlGradients)->Arg(38)->Arg(96)->Arg(240);

void BM_PosteriorOnMinuteGrid(benchmark::State& state) {
    const auto prior = GpPrior::make(InputEncoding::TimeOnly, 1);
    const auto task = make_task(38);
    const auto q = TimeGrid::day(60).instants();
    for (auto _ : state) benchmark::DoNotOptimize(posterior_predict(prior, task, q));
}
BENCHMARK(BM_PosteriorOnMinuteGrid);

void BM_CompleteStateMatrix(benchmark::State& state) {
    std::mt19937_64 rng(3);
    Eigen::MatrixXd X(37, 5);
    for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = 1.0 + 0.1 * standard_normal(rng);
    MaskMatrix mask(37, 5);
    for (Eigen::Index i = 0; i < mask.size(); ++i) mask.data()[i] = uniform01(rng) < 0.7;
    for (auto _ : state) benchmark::DoNotOptimize(complete_matrix(X, mask));
}
BENCHMARK(BM_CompleteStateMatrix);

void BM_SimulateDay(benchmark::State& state) {
    const auto feeder = load_feeder(bundled_feeder_path());
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(simulate_day(feeder, seed++));
}
BENCHMARK(BM_SimulateDay);

}  // namespace

BENCHMARK_MAIN();
