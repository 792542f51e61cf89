#pragma once

#include <Eigen/Dense>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "gridfuse/kernel.hpp"
#include "gridfuse/mean_net.hpp"
#include "gridfuse/timeseries.hpp"

namespace gridfuse {

enum class InputEncoding {
    TimeOnly,              // [t / horizon]
    TimePlusTaskFeatures,  // [t / horizon, one-hot quantity (P, Q, V), bus depth]
};

std::string_view to_string(InputEncoding e);

/// Shared GP prior: one mean network and one RBF kernel for every task.
///
/// Kernel inputs are times divided by `time_horizon`, so the length-scale is in
/// units of the horizon (a day by default). Task features, when enabled, feed
/// only the mean network; the kernel is purely temporal.
struct GpPrior {
    MeanNet mean;
    KernelParams kernel;
    InputEncoding encoding = InputEncoding::TimeOnly;
    double time_horizon = kSecondsPerDay;
    std::map<std::string, double> bus_depth;  // normalized depth per bus id
    JitterPolicy jitter;

    /// Glorot-initialized mean net with the given hidden widths and the default
    /// kernel (l = 0.1, sigma_s^2 = 1, sigma^2 = 0.01).
    static GpPrior make(InputEncoding encoding, std::uint64_t seed, std::vector<int> hidden = {32, 32});

    static int input_dim(InputEncoding encoding) noexcept;

    std::vector<double> kernel_inputs(std::span<const double> times) const;
    Eigen::MatrixXd mean_inputs(const TimeSeriesTask& identity, std::span<const double> times) const;
    Eigen::VectorXd mean_at(const TimeSeriesTask& identity, std::span<const double> times) const;

    /// [log l, log sigma_s^2, log sigma^2, mean-net parameters...]
    std::size_t parameter_count() const noexcept { return 3 + mean.parameter_count(); }
    std::vector<double> flatten() const;
    void assign(std::span<const double> params);
};

/// Closed-form per-task log marginal likelihood
///   -1/2 r^T A^{-1} r - 1/2 log|A| - n/2 log(2 pi),  A = K + sigma^2 I,  r = y - m(x).
double log_marginal_likelihood(const GpPrior& prior, const TimeSeriesTask& task);

/// Summed objective over tasks.
double log_marginal_likelihood(const GpPrior& prior, std::span<const TimeSeriesTask> tasks);

struct LmlGradient {
    double value = 0.0;             // summed LML
    std::vector<double> gradient;   // layout of GpPrior::flatten()

    double d_log_lengthscale() const { return gradient.at(0); }
    double d_log_signal_var() const { return gradient.at(1); }
    double d_log_noise_var() const { return gradient.at(2); }
};

/// Analytic gradient of the summed LML with respect to every prior parameter.
/// Kernel terms use 1/2 tr((alpha alpha^T - A^{-1}) dA/dtheta); the mean net
/// receives dLML/dm = alpha through backpropagation.
LmlGradient lml_gradients(const GpPrior& prior, std::span<const TimeSeriesTask> tasks);

struct PosteriorPrediction {
    std::vector<double> query_times;
    std::vector<double> mean;
    std::vector<double> variance;
    std::vector<double> ci_halfwidth;
    double level = 0.95;

    std::size_t size() const noexcept { return mean.size(); }
    std::vector<double> stddev() const;
};

/// Predictive distribution at `query_times` given `observed`:
///   m* = m(x*) + K*x A^{-1} (y - m(x)),  K* = K** - K*x A^{-1} Kx*.
/// Only the diagonal of K* is returned. `include_noise` adds sigma^2.
PosteriorPrediction posterior_predict(const GpPrior& prior, const TimeSeriesTask& observed,
                                      std::span<const double> query_times, bool include_noise = false,
                                      double level = 0.95);

struct Interval {
    double lower;
    double upper;
};

/// Two-sided standard-normal quantile: z such that P(|Z| <= z) = level.
double two_sided_z(double level);

std::vector<Interval> confidence_interval(const PosteriorPrediction& pred, double level);

}  // namespace gridfuse
