#include "gridfuse/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "gridfuse/error.hpp"

namespace gridfuse {

std::string_view to_string(Quantity q) {
    switch (q) {
        case Quantity::ActivePower_kW: return "P_kW";
        case Quantity::ReactivePower_kVAr: return "Q_kVAr";
        case Quantity::VoltageMag_pu: return "V_pu";
    }
    return "?";
}

std::string_view to_string(Phase p) {
    switch (p) {
        case Phase::A: return "A";
        case Phase::B: return "B";
        case Phase::C: return "C";
    }
    return "?";
}

std::optional<Quantity> parse_quantity(std::string_view s) {
    if (s == "P_kW") return Quantity::ActivePower_kW;
    if (s == "Q_kVAr") return Quantity::ReactivePower_kVAr;
    if (s == "V_pu") return Quantity::VoltageMag_pu;
    return std::nullopt;
}

std::optional<Phase> parse_phase(std::string_view s) {
    if (s == "A") return Phase::A;
    if (s == "B") return Phase::B;
    if (s == "C") return Phase::C;
    return std::nullopt;
}

TimeGrid::TimeGrid(double start, double step, std::size_t count)
    : start_(start), step_(step), count_(count) {
    if (!(step > 0.0) || !std::isfinite(step)) throw InvalidArgument("TimeGrid: step must be > 0");
    if (count == 0) throw InvalidArgument("TimeGrid: count must be >= 1");
    if (!std::isfinite(start)) throw InvalidArgument("TimeGrid: start must be finite");
}

std::vector<double> TimeGrid::instants() const {
    std::vector<double> out(count_);
    for (std::size_t i = 0; i < count_; ++i) out[i] = at(i);
    return out;
}

TimeGrid TimeGrid::day(double step) {
    if (!(step > 0.0)) throw InvalidArgument("TimeGrid::day: step must be > 0");
    const double n = kSecondsPerDay / step;
    if (std::abs(n - std::round(n)) > 1e-9)
        throw InvalidArgument("TimeGrid::day: step " + std::to_string(step) + " does not divide 86400");
    return TimeGrid(0.0, step, static_cast<std::size_t>(std::llround(n)));
}

TimeSeriesTask::TimeSeriesTask(std::string task_id, std::string bus_id, Phase phase,
                               Quantity quantity, std::vector<double> times,
                               std::vector<double> values)
    : task_id_(std::move(task_id)),
      bus_id_(std::move(bus_id)),
      phase_(phase),
      quantity_(quantity),
      times_(std::move(times)),
      values_(std::move(values)) {
    if (times_.size() != values_.size())
        throw InvalidArgument("task " + task_id_ + ": times and values differ in length");
    for (std::size_t i = 0; i < times_.size(); ++i) {
        if (!std::isfinite(times_[i]) || !std::isfinite(values_[i]))
            throw InvalidArgument("task " + task_id_ + ": non-finite sample at index " +
                                  std::to_string(i));
        if (i > 0 && !(times_[i] > times_[i - 1]))
            throw InvalidArgument("task " + task_id_ + ": timestamps not strictly increasing at index " +
                                  std::to_string(i));
    }
}

TimeSeriesTask TimeSeriesTask::with_samples(std::vector<double> times, std::vector<double> values) const {
    return TimeSeriesTask(task_id_, bus_id_, phase_, quantity_, std::move(times), std::move(values));
}

std::optional<std::size_t> TimeSeriesTask::find_time(double t) const {
    auto it = std::lower_bound(times_.begin(), times_.end(), t);
    if (it != times_.end() && *it == t) return static_cast<std::size_t>(it - times_.begin());
    return std::nullopt;
}

std::size_t kept_count(std::size_t n, double fraction) {
    return static_cast<std::size_t>(std::llround((1.0 - fraction) * static_cast<double>(n)));
}

std::pair<TimeSeriesTask, MissingnessMask> apply_missingness(const TimeSeriesTask& task,
                                                             double fraction,
                                                             std::uint64_t seed) {
    if (!(fraction >= 0.0 && fraction < 1.0))
        throw InvalidArgument("apply_missingness: fraction must lie in [0, 1)");
    if (task.empty()) throw InvalidArgument("apply_missingness: task " + task.task_id() + " is empty");

    const std::size_t n = task.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Fisher-Yates over the raw engine output so the permutation does not depend
    // on the standard library's distribution implementations.
    std::mt19937_64 rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(order[i - 1], order[j]);
    }
    std::vector<std::size_t> kept(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(kept_count(n, fraction)));
    std::sort(kept.begin(), kept.end());

    std::vector<double> t, v;
    t.reserve(kept.size());
    v.reserve(kept.size());
    for (std::size_t i : kept) {
        t.push_back(task.times()[i]);
        v.push_back(task.values()[i]);
    }
    MissingnessMask mask{task.task_id(), std::move(kept), seed, fraction};
    return {task.with_samples(std::move(t), std::move(v)), std::move(mask)};
}

std::vector<double> linear_interpolate(const TimeSeriesTask& task, std::span<const double> query) {
    if (task.empty()) throw NoDataError("linear_interpolate: task " + task.task_id() + " has no samples");
    const auto ts = task.times();
    const auto vs = task.values();
    std::vector<double> out(query.size());
    for (std::size_t q = 0; q < query.size(); ++q) {
        const double t = query[q];
        if (t <= ts.front()) {
            out[q] = vs.front();
            continue;
        }
        if (t >= ts.back()) {
            out[q] = vs.back();
            continue;
        }
        const auto hi = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), t) - ts.begin());
        const std::size_t lo = hi - 1;
        if (ts[lo] == t) {
            out[q] = vs[lo];
            continue;
        }
        const double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
        out[q] = vs[lo] + w * (vs[hi] - vs[lo]);
    }
    return out;
}

std::vector<double> linear_interpolate(const TimeSeriesTask& task, const TimeGrid& grid) {
    const auto q = grid.instants();
    return linear_interpolate(task, q);
}

std::pair<TimeSeriesTask, Standardization> standardize_task(const TimeSeriesTask& task) {
    Standardization s;
    const auto vs = task.values();
    if (!vs.empty()) {
        const double n = static_cast<double>(vs.size());
        s.mean = std::accumulate(vs.begin(), vs.end(), 0.0) / n;
        double ss = 0.0;
        for (double v : vs) ss += (v - s.mean) * (v - s.mean);
        const double sd = std::sqrt(ss / n);
        s.stddev = (vs.size() >= 2 && sd > 0.0) ? sd : 1.0;
    }
    std::vector<double> z(vs.size());
    for (std::size_t i = 0; i < vs.size(); ++i) z[i] = s.apply(vs[i]);
    const auto ts = task.times();
    return {task.with_samples({ts.begin(), ts.end()}, std::move(z)), s};
}

TimeSeriesTask destandardize_task(const TimeSeriesTask& task, const Standardization& s) {
    const auto vs = task.values();
    std::vector<double> v(vs.size());
    for (std::size_t i = 0; i < vs.size(); ++i) v[i] = s.invert(vs[i]);
    const auto ts = task.times();
    return task.with_samples({ts.begin(), ts.end()}, std::move(v));
}

double normalize_time(double t, double horizon) {
    if (!(horizon > 0.0)) throw InvalidArgument("normalize_time: horizon must be > 0");
    return t / horizon;
}

}  // namespace gridfuse
