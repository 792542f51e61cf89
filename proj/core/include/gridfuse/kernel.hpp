#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <span>

namespace gridfuse {

/// Squared-exponential kernel hyperparameters, stored in log space.
///
/// The noise variance may be exactly zero (log = -inf) for noiseless
/// conditioning; training clamps every log parameter to [kLogParamMin, kLogParamMax].
struct KernelParams {
    double log_lengthscale = std::log(0.1);
    double log_signal_var = 0.0;
    double log_noise_var = std::log(0.01);

    double lengthscale() const noexcept { return std::exp(log_lengthscale); }
    double signal_var() const noexcept { return std::exp(log_signal_var); }
    double noise_var() const noexcept { return std::exp(log_noise_var); }

    static KernelParams from_values(double lengthscale, double signal_var, double noise_var);
    bool valid() const noexcept;
};

inline constexpr double kLogParamMin = -20.0;
inline constexpr double kLogParamMax = 20.0;

/// sigma_s^2 * exp(-(x - x2)^2 / (2 l^2))
double rbf_kernel(double x, double x2, const KernelParams& params);

/// K[i][j] = rbf_kernel(xs[i], xs[j]), plus `jitter` on the diagonal.
Eigen::MatrixXd kernel_matrix(std::span<const double> xs, const KernelParams& params, double jitter = 0.0);

/// Cross-covariance K[i][j] = rbf_kernel(a[i], b[j]).
Eigen::MatrixXd cross_kernel(std::span<const double> a, std::span<const double> b, const KernelParams& params);

/// Escalation schedule for the diagonal jitter, relative to sigma_s^2. The
/// first attempt is unjittered; then 1e-6, 1e-5, 1e-4.
struct JitterPolicy {
    double first_relative = 1e-6;
    double max_relative = 1e-4;
    double factor = 10.0;
    bool try_zero_first = true;
};

/// Cholesky factor of K + sigma^2 I + jitter I.
struct CovarianceFactor {
    Eigen::LLT<Eigen::MatrixXd> llt;
    double jitter = 0.0;  // absolute value added to the diagonal

    Eigen::VectorXd solve(const Eigen::VectorXd& b) const { return llt.solve(b); }
    double log_det() const;
};

/// Factorizes K(xs, xs) + sigma^2 I, escalating jitter per `policy`.
/// Throws NumericalFailure when every attempt fails.
CovarianceFactor factorize_covariance(std::span<const double> xs, const KernelParams& params,
                                      const JitterPolicy& policy = {});

}  // namespace gridfuse
