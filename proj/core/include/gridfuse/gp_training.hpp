#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gridfuse/gp_model.hpp"
#include "gridfuse/timeseries.hpp"

namespace gridfuse {

enum class Batching {
    /// One Adam step per epoch on the gradient summed over all tasks.
    FullBatch,
    /// One Adam step per task per epoch, tasks visited in seeded shuffled order.
    PerTask,
};

struct TrainConfig {
    int epochs = 100;
    double learning_rate = 0.01;
    std::uint64_t seed = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    InputEncoding encoding = InputEncoding::TimeOnly;
    std::vector<int> hidden = {32, 32};
    /// Standardize each task by its own mean/std before fitting.
    bool standardize = true;
    Batching batching = Batching::PerTask;
};

struct TrainResult {
    GpPrior prior;
    /// Summed LML (in the training space) before each Adam step, plus the
    /// value after the final step.
    std::vector<double> lml_history;
    double initial_lml = 0.0;
    double final_lml = 0.0;
    int best_epoch = 0;
};

/// Adam ascent on the summed LML. Log kernel parameters are clamped to
/// [-20, 20] after every step. The summed LML is recorded at every epoch
/// boundary and the best such iterate is returned, so
/// final_lml >= initial_lml.
///
/// `initial`, when given, replaces the seeded initialization; its bus_depth
/// map and encoding are kept.
TrainResult train_prior(std::span<const TimeSeriesTask> tasks, const TrainConfig& config,
                        std::optional<GpPrior> initial = std::nullopt);

}  // namespace gridfuse
