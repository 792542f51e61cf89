#include "gridfuse/gp_model.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numbers>

#include "gridfuse/error.hpp"

namespace gridfuse {

std::string_view to_string(InputEncoding e) {
    switch (e) {
        case InputEncoding::TimeOnly: return "time_only";
        case InputEncoding::TimePlusTaskFeatures: return "time_plus_task_features";
    }
    return "?";
}

int GpPrior::input_dim(InputEncoding encoding) noexcept {
    return encoding == InputEncoding::TimeOnly ? 1 : 5;
}

GpPrior GpPrior::make(InputEncoding encoding, std::uint64_t seed, std::vector<int> hidden) {
    std::vector<int> dims{input_dim(encoding)};
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(1);
    GpPrior prior;
    prior.mean = MeanNet::glorot(std::move(dims), seed);
    prior.kernel = KernelParams{};
    prior.encoding = encoding;
    return prior;
}

std::vector<double> GpPrior::kernel_inputs(std::span<const double> times) const {
    std::vector<double> x(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) x[i] = normalize_time(times[i], time_horizon);
    return x;
}

Eigen::MatrixXd GpPrior::mean_inputs(const TimeSeriesTask& identity, std::span<const double> times) const {
    const int d = input_dim(encoding);
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(times.size()), d);
    for (std::size_t i = 0; i < times.size(); ++i) X(static_cast<Eigen::Index>(i), 0) = normalize_time(times[i], time_horizon);
    if (encoding == InputEncoding::TimePlusTaskFeatures) {
        const int q = static_cast<int>(identity.quantity());
        auto it = bus_depth.find(identity.bus_id());
        const double depth = it == bus_depth.end() ? 0.0 : it->second;
        X.col(1 + q).setOnes();
        X.col(4).setConstant(depth);
    }
    return X;
}

Eigen::VectorXd GpPrior::mean_at(const TimeSeriesTask& identity, std::span<const double> times) const {
    if (times.empty()) return {};
    return mean.forward(mean_inputs(identity, times));
}

std::vector<double> GpPrior::flatten() const {
    std::vector<double> p{kernel.log_lengthscale, kernel.log_signal_var, kernel.log_noise_var};
    auto m = mean.flatten();
    p.insert(p.end(), m.begin(), m.end());
    return p;
}

void GpPrior::assign(std::span<const double> params) {
    if (params.size() != parameter_count())
        throw InvalidArgument("GpPrior::assign: parameter count mismatch");
    kernel.log_lengthscale = params[0];
    kernel.log_signal_var = params[1];
    kernel.log_noise_var = params[2];
    mean.assign(params.subspan(3));
}

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // log(2 pi)

struct TaskTerms {
    std::vector<double> x;
    Eigen::VectorXd residual;
    CovarianceFactor factor;
    Eigen::VectorXd alpha;
};

TaskTerms task_terms(const GpPrior& prior, const TimeSeriesTask& task) {
    if (task.empty()) throw NoDataError("log marginal likelihood: task " + task.task_id() + " is empty");
    TaskTerms t;
    t.x = prior.kernel_inputs(task.times());
    const Eigen::VectorXd m = prior.mean_at(task, task.times());
    t.residual = Eigen::Map<const Eigen::VectorXd>(task.values().data(), static_cast<Eigen::Index>(task.size())) - m;
    t.factor = factorize_covariance(t.x, prior.kernel, prior.jitter);
    t.alpha = t.factor.solve(t.residual);
    return t;
}

double lml_from_terms(const TaskTerms& t) {
    const double n = static_cast<double>(t.residual.size());
    return -0.5 * t.residual.dot(t.alpha) - 0.5 * t.factor.log_det() - 0.5 * n * kLog2Pi;
}

}  // namespace

double log_marginal_likelihood(const GpPrior& prior, const TimeSeriesTask& task) {
    return lml_from_terms(task_terms(prior, task));
}

double log_marginal_likelihood(const GpPrior& prior, std::span<const TimeSeriesTask> tasks) {
    double sum = 0.0;
    for (const auto& task : tasks) sum += log_marginal_likelihood(prior, task);
    return sum;
}

LmlGradient lml_gradients(const GpPrior& prior, std::span<const TimeSeriesTask> tasks) {
    LmlGradient out;
    out.gradient.assign(prior.parameter_count(), 0.0);
    std::span<double> mean_grad(out.gradient.data() + 3, out.gradient.size() - 3);

    const double inv_l2 = 1.0 / (prior.kernel.lengthscale() * prior.kernel.lengthscale());
    const double noise = prior.kernel.noise_var();

    for (const auto& task : tasks) {
        const TaskTerms t = task_terms(prior, task);
        out.value += lml_from_terms(t);

        const auto n = t.alpha.size();
        Eigen::MatrixXd W = t.factor.llt.solve(Eigen::MatrixXd::Identity(n, n));
        W = t.alpha * t.alpha.transpose() - W;  // alpha alpha^T - A^{-1}

        const Eigen::MatrixXd K = kernel_matrix(t.x, prior.kernel, 0.0);
        double g_l = 0.0, g_s = 0.0;
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index i = 0; i < n; ++i) {
                const double d = t.x[i] - t.x[j];
                const double wk = W(i, j) * K(i, j);
                g_l += wk * d * d * inv_l2;
                g_s += wk;
            }
        // Jitter is proportional to sigma_s^2, so it moves with log sigma_s^2.
        const double trace_w = W.trace();
        g_s += t.factor.jitter * trace_w;

        out.gradient[0] += 0.5 * g_l;
        out.gradient[1] += 0.5 * g_s;
        out.gradient[2] += 0.5 * noise * trace_w;

        prior.mean.backward(prior.mean_inputs(task, task.times()), t.alpha, mean_grad);
    }
    return out;
}

std::vector<double> PosteriorPrediction::stddev() const {
    std::vector<double> s(variance.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::sqrt(variance[i]);
    return s;
}

double two_sided_z(double level) {
    if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("confidence level must lie in (0, 1)");
    static const boost::math::normal_distribution<double> standard;
    return boost::math::quantile(standard, 0.5 * (1.0 + level));
}

PosteriorPrediction posterior_predict(const GpPrior& prior, const TimeSeriesTask& observed,
                                      std::span<const double> query_times, bool include_noise,
                                      double level) {
    if (query_times.empty()) throw InvalidArgument("posterior_predict: no query times");
    const double z = two_sided_z(level);

    PosteriorPrediction pred;
    pred.level = level;
    pred.query_times.assign(query_times.begin(), query_times.end());
    const auto nq = static_cast<Eigen::Index>(query_times.size());

    const std::vector<double> xq = prior.kernel_inputs(query_times);
    Eigen::VectorXd mean = prior.mean_at(observed, query_times);
    Eigen::VectorXd var = Eigen::VectorXd::Constant(nq, prior.kernel.signal_var());

    if (!observed.empty()) {
        const TaskTerms t = task_terms(prior, observed);
        const Eigen::MatrixXd Kqo = cross_kernel(xq, t.x, prior.kernel);
        mean.noalias() += Kqo * t.alpha;
        // V = L^{-1} K_oq; diag(K_qo A^{-1} K_oq) = column norms of V.
        Eigen::MatrixXd V = Kqo.transpose();
        t.factor.llt.matrixL().solveInPlace(V);
        var -= V.colwise().squaredNorm().transpose();
    }
    if (include_noise) var.array() += prior.kernel.noise_var();

    pred.mean.assign(mean.data(), mean.data() + nq);
    pred.variance.resize(static_cast<std::size_t>(nq));
    pred.ci_halfwidth.resize(static_cast<std::size_t>(nq));
    for (Eigen::Index i = 0; i < nq; ++i) {
        const double v = std::max(var[i], 0.0);
        pred.variance[static_cast<std::size_t>(i)] = v;
        pred.ci_halfwidth[static_cast<std::size_t>(i)] = z * std::sqrt(v);
    }
    return pred;
}

std::vector<Interval> confidence_interval(const PosteriorPrediction& pred, double level) {
    const double z = two_sided_z(level);
    std::vector<Interval> out(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double h = z * std::sqrt(std::max(pred.variance[i], 0.0));
        out[i] = {pred.mean[i] - h, pred.mean[i] + h};
    }
    return out;
}

}  // namespace gridfuse
