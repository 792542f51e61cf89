#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "gridfuse/gp_model.hpp"

namespace gridfuse::testing {

/// Prior with m == 0, time measured directly in kernel units.
inline GpPrior zero_mean_prior(double lengthscale, double signal_var, double noise_var) {
    GpPrior p = GpPrior::make(InputEncoding::TimeOnly, 0);
    p.mean = MeanNet(p.mean.layer_dims());
    p.kernel = KernelParams::from_values(lengthscale, signal_var, noise_var);
    p.time_horizon = 1.0;
    return p;
}

inline TimeSeriesTask task_of(std::vector<double> t, std::vector<double> v,
                              Quantity q = Quantity::ActivePower_kW, std::string bus = "701") {
    const std::string suffix = q == Quantity::ActivePower_kW ? ".P" : q == Quantity::ReactivePower_kVAr ? ".Q" : ".V";
    return TimeSeriesTask(bus + suffix, bus, Phase::A, q, std::move(t), std::move(v));
}

/// n samples at sorted random times in a day, values of a smooth curve plus noise.
inline TimeSeriesTask random_task(std::size_t n, std::uint64_t seed, Quantity q = Quantity::ActivePower_kW,
                                  std::string bus = "701") {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 86400.0);
    std::normal_distribution<double> noise(0.0, 0.1);
    std::vector<double> t(n);
    for (auto& x : t) x = u(rng);
    std::sort(t.begin(), t.end());
    std::vector<double> v;
    for (double x : t) v.push_back(std::sin(x / 86400.0 * 6.28) + noise(rng));
    return task_of(t, v, q, std::move(bus));
}

}  // namespace gridfuse::testing
