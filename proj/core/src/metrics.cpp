#include "gridfuse/metrics.hpp"

#include <cmath>

#include "gridfuse/error.hpp"

namespace gridfuse {

double rmse_percent(std::span<const double> truth, std::span<const double> estimate) {
    if (truth.size() != estimate.size()) throw InvalidArgument("rmse_percent: length mismatch");
    if (truth.empty()) throw InvalidArgument("rmse_percent: empty input");
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double d = estimate[i] - truth[i];
        err += d * d;
        ref += truth[i] * truth[i];
    }
    if (!(ref > 0.0)) throw InvalidArgument("rmse_percent: truth has zero RMS");
    // The 1/n factors cancel.
    return 100.0 * std::sqrt(err / ref);
}

double mean_absolute_error(std::span<const double> truth, std::span<const double> estimate) {
    if (truth.size() != estimate.size()) throw InvalidArgument("mean_absolute_error: length mismatch");
    if (truth.empty()) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) s += std::abs(estimate[i] - truth[i]);
    return s / static_cast<double>(truth.size());
}

double ci_coverage(std::span<const double> truth, const PosteriorPrediction& pred, double level) {
    if (truth.size() != pred.size()) throw InvalidArgument("ci_coverage: length mismatch");
    if (truth.empty()) throw InvalidArgument("ci_coverage: empty input");
    const auto ci = confidence_interval(pred, level);
    std::size_t inside = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        if (truth[i] >= ci[i].lower && truth[i] <= ci[i].upper) ++inside;
    return static_cast<double>(inside) / static_cast<double>(truth.size());
}

}  // namespace gridfuse
