#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gridfuse/gp_model.hpp"
#include "gridfuse/timeseries.hpp"

namespace gridfuse {

enum class ImputationMethod { Gp, Linear };

std::string_view to_string(ImputationMethod m);
std::optional<ImputationMethod> parse_method(std::string_view s);

/// A task reconstructed on a grid, in the task's native units. `stddev` is
/// empty for methods without uncertainty.
struct ImputedSeries {
    std::vector<double> times;
    std::vector<double> mean;
    std::vector<double> stddev;
};

/// GP imputation in native units: the observed samples are standardized, the
/// posterior is evaluated at `query_times`, and the result is mapped back.
/// Query instants that coincide with an observed sample return that sample
/// unchanged (the variance stays the posterior one).
PosteriorPrediction impute_gp(const GpPrior& prior, const TimeSeriesTask& observed,
                              std::span<const double> query_times, double level = 0.95);

ImputedSeries impute(ImputationMethod method, const GpPrior* prior, const TimeSeriesTask& observed,
                     std::span<const double> query_times);

struct ImputedTask {
    std::string task_id;
    ImputedSeries series;
};

/// CSV: task_id,timestamp_s,mean,std. A series without uncertainty writes
/// "nan" in the std column and reads back with an empty stddev.
inline constexpr std::string_view kImputedHeader = "task_id,timestamp_s,mean,std";
void write_imputed(std::ostream& os, std::span<const ImputedTask> tasks);
std::vector<ImputedTask> read_imputed(std::istream& is, const std::string& source = "<imputed>");
std::vector<ImputedTask> read_imputed(const std::filesystem::path& path);

}  // namespace gridfuse
