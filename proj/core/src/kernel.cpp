#include "gridfuse/kernel.hpp"

#include <limits>
#include <optional>
#include <string>

#include "gridfuse/error.hpp"

namespace gridfuse {

KernelParams KernelParams::from_values(double lengthscale, double signal_var, double noise_var) {
    if (!(lengthscale > 0.0) || !(signal_var > 0.0) || !(noise_var >= 0.0))
        throw InvalidArgument("KernelParams: lengthscale and signal variance must be > 0, noise >= 0");
    KernelParams p;
    p.log_lengthscale = std::log(lengthscale);
    p.log_signal_var = std::log(signal_var);
    p.log_noise_var = noise_var > 0.0 ? std::log(noise_var) : -std::numeric_limits<double>::infinity();
    return p;
}

bool KernelParams::valid() const noexcept {
    const double l = lengthscale(), s = signal_var(), n = noise_var();
    return std::isfinite(l) && l > 0.0 && std::isfinite(s) && s > 0.0 && std::isfinite(n) && n >= 0.0;
}

double rbf_kernel(double x, double x2, const KernelParams& params) {
    const double d = (x - x2) / params.lengthscale();
    return params.signal_var() * std::exp(-0.5 * d * d);
}

Eigen::MatrixXd kernel_matrix(std::span<const double> xs, const KernelParams& params, double jitter) {
    const auto n = static_cast<Eigen::Index>(xs.size());
    const double s2 = params.signal_var();
    const double inv_l = 1.0 / params.lengthscale();
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        K(j, j) = s2 + jitter;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            const double d = (xs[i] - xs[j]) * inv_l;
            const double v = s2 * std::exp(-0.5 * d * d);
            K(i, j) = v;
            K(j, i) = v;
        }
    }
    return K;
}

Eigen::MatrixXd cross_kernel(std::span<const double> a, std::span<const double> b, const KernelParams& params) {
    const double s2 = params.signal_var();
    const double inv_l = 1.0 / params.lengthscale();
    Eigen::MatrixXd K(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
    for (Eigen::Index j = 0; j < K.cols(); ++j)
        for (Eigen::Index i = 0; i < K.rows(); ++i) {
            const double d = (a[i] - b[j]) * inv_l;
            K(i, j) = s2 * std::exp(-0.5 * d * d);
        }
    return K;
}

double CovarianceFactor::log_det() const {
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

namespace {

bool factor_ok(const Eigen::LLT<Eigen::MatrixXd>& llt) {
    if (llt.info() != Eigen::Success) return false;
    const auto d = llt.matrixLLT().diagonal();
    for (Eigen::Index i = 0; i < d.size(); ++i)
        if (!(d[i] > 0.0) || !std::isfinite(d[i])) return false;
    return true;
}

}  // namespace

CovarianceFactor factorize_covariance(std::span<const double> xs, const KernelParams& params,
                                      const JitterPolicy& policy) {
    if (!params.valid()) throw NumericalFailure("factorize_covariance: kernel parameters not finite");
    const double s2 = params.signal_var();
    Eigen::MatrixXd K = kernel_matrix(xs, params, params.noise_var());

    auto attempt = [&](double jitter) -> std::optional<CovarianceFactor> {
        CovarianceFactor f;
        if (jitter > 0.0) {
            Eigen::MatrixXd Kj = K;
            Kj.diagonal().array() += jitter;
            f.llt.compute(Kj);
        } else {
            f.llt.compute(K);
        }
        f.jitter = jitter;
        if (factor_ok(f.llt)) return f;
        return std::nullopt;
    };

    if (policy.try_zero_first)
        if (auto f = attempt(0.0)) return std::move(*f);
    for (double rel = policy.first_relative; rel <= policy.max_relative * (1.0 + 1e-9); rel *= policy.factor)
        if (auto f = attempt(rel * s2)) return std::move(*f);
    throw NumericalFailure("Cholesky factorization failed for " + std::to_string(xs.size()) +
                           " points after jitter escalation to " + std::to_string(policy.max_relative) +
                           " x signal variance");
}

}  // namespace gridfuse
