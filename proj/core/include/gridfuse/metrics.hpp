#pragma once

#include <span>

#include "gridfuse/gp_model.hpp"

namespace gridfuse {

/// 100 * RMS(estimate - truth) / RMS(truth).
double rmse_percent(std::span<const double> truth, std::span<const double> estimate);

double mean_absolute_error(std::span<const double> truth, std::span<const double> estimate);

/// Fraction of truth points inside the `level` interval of `pred`.
double ci_coverage(std::span<const double> truth, const PosteriorPrediction& pred, double level);

}  // namespace gridfuse
