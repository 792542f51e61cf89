#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gridfuse {

inline constexpr double kSecondsPerDay = 86400.0;

enum class Phase { A, B, C };

enum class Quantity { ActivePower_kW, ReactivePower_kVAr, VoltageMag_pu };

/// CSV spellings: "P_kW", "Q_kVAr", "V_pu".
std::string_view to_string(Quantity q);
std::string_view to_string(Phase p);
std::optional<Quantity> parse_quantity(std::string_view s);
std::optional<Phase> parse_phase(std::string_view s);

/// Regular sampling grid in seconds since midnight.
class TimeGrid {
public:
    TimeGrid(double start, double step, std::size_t count);

    double start() const noexcept { return start_; }
    double step() const noexcept { return step_; }
    std::size_t count() const noexcept { return count_; }
    double end() const noexcept { return at(count_ - 1); }
    double at(std::size_t i) const noexcept { return start_ + step_ * static_cast<double>(i); }
    std::vector<double> instants() const;

    /// Grid covering [0, 86400) at `step`; `step` must divide a day.
    static TimeGrid day(double step);

private:
    double start_;
    double step_;
    std::size_t count_;
};

struct Sample {
    double t;
    double value;
};

/// One sensor stream. Timestamps are strictly increasing and values finite.
class TimeSeriesTask {
public:
    TimeSeriesTask() = default;
    TimeSeriesTask(std::string task_id, std::string bus_id, Phase phase, Quantity quantity,
                   std::vector<double> times, std::vector<double> values);

    const std::string& task_id() const noexcept { return task_id_; }
    const std::string& bus_id() const noexcept { return bus_id_; }
    Phase phase() const noexcept { return phase_; }
    Quantity quantity() const noexcept { return quantity_; }

    std::span<const double> times() const noexcept { return times_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return times_.size(); }
    bool empty() const noexcept { return times_.empty(); }
    Sample operator[](std::size_t i) const { return {times_[i], values_[i]}; }

    /// Same identity, different samples (validated).
    TimeSeriesTask with_samples(std::vector<double> times, std::vector<double> values) const;

    /// Index of the sample at exactly time `t`, if any.
    std::optional<std::size_t> find_time(double t) const;

private:
    std::string task_id_;
    std::string bus_id_;
    Phase phase_ = Phase::A;
    Quantity quantity_ = Quantity::ActivePower_kW;
    std::vector<double> times_;
    std::vector<double> values_;
};

struct MissingnessMask {
    std::string task_id;
    std::vector<std::size_t> kept_indices;  // sorted, into the pristine sample list
    std::uint64_t seed = 0;
    double fraction_missing = 0.0;
};

/// Number of samples kept out of `n` at missing fraction `fraction`.
std::size_t kept_count(std::size_t n, double fraction);

/// Drops round(fraction * n) samples uniformly at random. For a fixed seed the
/// kept sets are nested: a smaller fraction keeps a superset of the samples a
/// larger fraction keeps.
std::pair<TimeSeriesTask, MissingnessMask> apply_missingness(const TimeSeriesTask& task,
                                                             double fraction,
                                                             std::uint64_t seed);

/// Piecewise-linear interpolation with constant hold beyond the observed span.
std::vector<double> linear_interpolate(const TimeSeriesTask& task, const TimeGrid& grid);
std::vector<double> linear_interpolate(const TimeSeriesTask& task, std::span<const double> query);

struct Standardization {
    double mean = 0.0;
    double stddev = 1.0;

    double apply(double v) const noexcept { return (v - mean) / stddev; }
    double invert(double z) const noexcept { return z * stddev + mean; }
};

/// Mean/std standardization with the population (1/n) std, clamped to 1 when
/// the task has fewer than two samples or zero variance.
std::pair<TimeSeriesTask, Standardization> standardize_task(const TimeSeriesTask& task);
TimeSeriesTask destandardize_task(const TimeSeriesTask& task, const Standardization& s);

/// Maps seconds to [0, 1] over `horizon`.
double normalize_time(double t, double horizon = kSecondsPerDay);

}  // namespace gridfuse
