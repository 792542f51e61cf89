#include "gridfuse/gp_training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "gridfuse/error.hpp"
#include "gridfuse/rng.hpp"

namespace gridfuse {

namespace {

std::vector<TimeSeriesTask> training_view(std::span<const TimeSeriesTask> tasks, bool standardize) {
    std::vector<TimeSeriesTask> out;
    out.reserve(tasks.size());
    for (const auto& t : tasks) {
        if (t.empty()) continue;
        out.push_back(standardize ? standardize_task(t).first : t);
    }
    return out;
}

}  // namespace

TrainResult train_prior(std::span<const TimeSeriesTask> tasks, const TrainConfig& config,
                        std::optional<GpPrior> initial) {
    if (config.epochs < 0) throw InvalidArgument("train_prior: epochs must be >= 0");
    if (!(config.learning_rate > 0.0)) throw InvalidArgument("train_prior: learning rate must be > 0");
    const auto data = training_view(tasks, config.standardize);
    if (data.empty()) throw InvalidArgument("train_prior: need at least one nonempty task");

    TrainResult result;
    GpPrior prior = initial ? std::move(*initial) : GpPrior::make(config.encoding, config.seed, config.hidden);

    std::vector<double> params = prior.flatten();
    const std::size_t P = params.size();
    std::vector<double> m(P, 0.0), v(P, 0.0);
    std::vector<double> best = params;
    double best_lml = -std::numeric_limits<double>::infinity();

    double b1t = 1.0, b2t = 1.0;
    auto adam_step = [&](const std::vector<double>& grad, int epoch) {
        b1t *= config.beta1;
        b2t *= config.beta2;
        for (std::size_t k = 0; k < P; ++k) {
            // Ascent: step along +gradient.
            const double gk = grad[k];
            if (!std::isfinite(gk))
                throw TrainingDiverged("train_prior: non-finite gradient at epoch " + std::to_string(epoch));
            m[k] = config.beta1 * m[k] + (1.0 - config.beta1) * gk;
            v[k] = config.beta2 * v[k] + (1.0 - config.beta2) * gk * gk;
            const double mhat = m[k] / (1.0 - b1t);
            const double vhat = v[k] / (1.0 - b2t);
            params[k] += config.learning_rate * mhat / (std::sqrt(vhat) + config.epsilon);
        }
        for (std::size_t k = 0; k < 3; ++k) params[k] = std::clamp(params[k], kLogParamMin, kLogParamMax);
    };
    auto record = [&](double value, int epoch) {
        if (!std::isfinite(value))
            throw TrainingDiverged("train_prior: non-finite log marginal likelihood at epoch " + std::to_string(epoch));
        result.lml_history.push_back(value);
        if (value > best_lml) {
            best_lml = value;
            best = params;
            result.best_epoch = epoch;
        }
    };

    std::mt19937_64 rng(mix_seed(config.seed ^ 0x7452a1bULL));
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (int epoch = 0; epoch <= config.epochs; ++epoch) {
        prior.assign(params);
        if (config.batching == Batching::FullBatch || epoch == config.epochs) {
            const LmlGradient g = lml_gradients(prior, data);
            record(g.value, epoch);
            if (epoch == config.epochs) break;
            adam_step(g.gradient, epoch);
            continue;
        }
        record(log_marginal_likelihood(prior, data), epoch);
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
        for (std::size_t i : order) {
            prior.assign(params);
            const LmlGradient g = lml_gradients(prior, std::span<const TimeSeriesTask>(&data[i], 1));
            adam_step(g.gradient, epoch);
        }
    }

    prior.assign(best);
    result.prior = std::move(prior);
    result.initial_lml = result.lml_history.front();
    result.final_lml = best_lml;
    return result;
}

}  // namespace gridfuse
