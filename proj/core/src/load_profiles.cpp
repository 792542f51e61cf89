#include "gridfuse/feeder.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "gridfuse/error.hpp"
#include "gridfuse/rng.hpp"

namespace gridfuse {

double reactive_ratio(double power_factor) {
    if (!(power_factor > 0.0 && power_factor <= 1.0))
        throw InvalidArgument("power factor must lie in (0, 1]");
    return std::tan(std::acos(power_factor));
}

namespace {

struct CurveShape {
    double base;
    double morning_amp, morning_center_h, morning_width_h;
    double evening_amp, evening_center_h, evening_width_h;
    std::array<double, 4> wiggle_amp;
    std::array<double, 4> wiggle_period_h;
    std::array<double, 4> wiggle_phase;
};

CurveShape draw_shape(std::mt19937_64& rng) {
    auto n = [&] { return standard_normal(rng); };
    auto u = [&](double lo, double hi) { return lo + (hi - lo) * uniform01(rng); };
    CurveShape s{};
    s.base = 0.30 * (1.0 + 0.10 * n());
    s.morning_amp = 0.45 * (1.0 + 0.20 * n());
    s.morning_center_h = 7.5 + 0.35 * n();
    s.morning_width_h = 1.3 * (1.0 + 0.10 * n());
    s.evening_amp = 0.90 * (1.0 + 0.15 * n());
    s.evening_center_h = 19.0 + 0.45 * n();
    s.evening_width_h = 2.0 * (1.0 + 0.10 * n());
    for (std::size_t k = 0; k < 4; ++k) {
        s.wiggle_amp[k] = 0.025 * u(0.5, 1.5);
        s.wiggle_period_h[k] = u(2.5, 8.0);
        s.wiggle_phase[k] = u(0.0, 2.0 * std::numbers::pi);
    }
    return s;
}

double evaluate(const CurveShape& s, double hour) {
    auto bump = [](double h, double c, double w) {
        const double d = (h - c) / w;
        return std::exp(-0.5 * d * d);
    };
    double v = s.base + s.morning_amp * bump(hour, s.morning_center_h, s.morning_width_h) +
               s.evening_amp * bump(hour, s.evening_center_h, s.evening_width_h);
    for (std::size_t k = 0; k < 4; ++k)
        v += s.wiggle_amp[k] * std::sin(2.0 * std::numbers::pi * hour / s.wiggle_period_h[k] + s.wiggle_phase[k]);
    return std::max(v, 0.05);
}

// Linear interpolation in a per-minute array; clamps past the last minute.
double at_minute(const std::vector<double>& a, double t) {
    const double m = std::clamp(t / 60.0, 0.0, static_cast<double>(a.size() - 1));
    const auto lo = static_cast<std::size_t>(std::floor(m));
    const std::size_t hi = std::min(lo + 1, a.size() - 1);
    const double w = m - static_cast<double>(lo);
    return w == 0.0 ? a[lo] : a[lo] + w * (a[hi] - a[lo]);
}

}  // namespace

std::vector<LoadProfile> generate_load_profiles(const FeederModel& feeder, std::uint64_t seed, double pf) {
    const double ratio = reactive_ratio(pf);
    std::vector<LoadProfile> out;
    for (std::size_t i : feeder.load_buses()) {
        const auto& bus = feeder.bus(i);
        std::mt19937_64 rng(derive_seed(seed, bus.id));
        const CurveShape shape = draw_shape(rng);
        LoadProfile prof;
        prof.bus_id = bus.id;
        prof.p_kw.resize(kMinutesPerDay);
        for (std::size_t m = 0; m < kMinutesPerDay; ++m) prof.p_kw[m] = evaluate(shape, static_cast<double>(m) / 60.0);
        const double peak = *std::max_element(prof.p_kw.begin(), prof.p_kw.end());
        const double scale = bus.load_kw / peak;
        prof.q_kvar.resize(kMinutesPerDay);
        for (std::size_t m = 0; m < kMinutesPerDay; ++m) {
            prof.p_kw[m] *= scale;
            prof.q_kvar[m] = prof.p_kw[m] * ratio;
        }
        out.push_back(std::move(prof));
    }
    return out;
}

SimulatedDay simulate_day(const FeederModel& feeder, std::uint64_t seed, double pf) {
    SimulatedDay day;
    day.profiles = generate_load_profiles(feeder, seed, pf);
    day.profile_index.assign(feeder.size(), -1);
    for (std::size_t k = 0; k < day.profiles.size(); ++k)
        day.profile_index[*feeder.index_of(day.profiles[k].bus_id)] = static_cast<int>(k);

    day.flows.reserve(kMinutesPerDay);
    std::vector<BusLoad> loads(feeder.size());
    const double base = feeder.base_kva();
    for (std::size_t m = 0; m < kMinutesPerDay; ++m) {
        for (std::size_t i = 0; i < feeder.size(); ++i) {
            const int k = day.profile_index[i];
            loads[i] = k < 0 ? BusLoad{} : BusLoad{day.profiles[k].p_kw[m] / base, day.profiles[k].q_kvar[m] / base};
        }
        day.flows.push_back(lindistflow_solve(feeder, loads));
    }
    return day;
}

double SimulatedDay::p_kw(const FeederModel&, std::size_t bus, double t) const {
    const int k = profile_index.at(bus);
    return k < 0 ? 0.0 : at_minute(profiles[k].p_kw, t);
}

double SimulatedDay::q_kvar(const FeederModel&, std::size_t bus, double t) const {
    const int k = profile_index.at(bus);
    return k < 0 ? 0.0 : at_minute(profiles[k].q_kvar, t);
}

double SimulatedDay::v_mag(std::size_t bus, double t) const {
    const double m = std::clamp(t / 60.0, 0.0, static_cast<double>(flows.size() - 1));
    const auto lo = static_cast<std::size_t>(std::floor(m));
    const std::size_t hi = std::min(lo + 1, flows.size() - 1);
    const double w = m - static_cast<double>(lo);
    const double a = flows[lo].v_mag.at(bus);
    return w == 0.0 ? a : a + w * (flows[hi].v_mag.at(bus) - a);
}

double SimulatedDay::angle(std::size_t bus, double t) const {
    const double m = std::clamp(t / 60.0, 0.0, static_cast<double>(flows.size() - 1));
    const auto lo = static_cast<std::size_t>(std::floor(m));
    const std::size_t hi = std::min(lo + 1, flows.size() - 1);
    const double w = m - static_cast<double>(lo);
    const double a = flows[lo].angle_rad.at(bus);
    return w == 0.0 ? a : a + w * (flows[hi].angle_rad.at(bus) - a);
}

TimeSeriesTask truth_task(const FeederModel& feeder, const SimulatedDay& day, const TimeSeriesTask& identity,
                          std::span<const double> times) {
    const auto bus = feeder.index_of(identity.bus_id());
    if (!bus) throw InvalidArgument("truth_task: unknown bus '" + identity.bus_id() + "'");
    std::vector<double> v(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        switch (identity.quantity()) {
            case Quantity::ActivePower_kW: v[i] = day.p_kw(feeder, *bus, times[i]); break;
            case Quantity::ReactivePower_kVAr: v[i] = day.q_kvar(feeder, *bus, times[i]); break;
            case Quantity::VoltageMag_pu: v[i] = day.v_mag(*bus, times[i]); break;
        }
    }
    return identity.with_samples({times.begin(), times.end()}, std::move(v));
}

std::vector<TimeSeriesTask> sample_measurements(const FeederModel& feeder, const SimulatedDay& day,
                                                const SamplingConfig& config) {
    if (!(config.noise_relative >= 0.0)) throw InvalidArgument("sample_measurements: noise must be >= 0");
    const TimeGrid ami = TimeGrid::day(config.ami_step);
    const TimeGrid scada = TimeGrid::day(config.scada_step);
    const auto ami_t = ami.instants();
    const auto scada_t = scada.instants();

    auto noisy = [&](TimeSeriesTask truth) {
        if (config.noise_relative == 0.0) return truth;
        const auto v = truth.values();
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        const double sd = config.noise_relative * std::sqrt(ss / static_cast<double>(v.size()));
        std::mt19937_64 rng(derive_seed(config.noise_seed, truth.task_id()));
        std::vector<double> out(v.begin(), v.end());
        for (double& x : out) x += sd * standard_normal(rng);
        const auto t = truth.times();
        return truth.with_samples({t.begin(), t.end()}, std::move(out));
    };

    std::vector<TimeSeriesTask> tasks;
    for (std::size_t i : feeder.load_buses()) {
        const auto& id = feeder.bus(i).id;
        TimeSeriesTask p(id + ".P", id, Phase::A, Quantity::ActivePower_kW, {}, {});
        TimeSeriesTask q(id + ".Q", id, Phase::A, Quantity::ReactivePower_kVAr, {}, {});
        tasks.push_back(noisy(truth_task(feeder, day, p, ami_t)));
        tasks.push_back(noisy(truth_task(feeder, day, q, ami_t)));
    }
    for (std::size_t i = 0; i < feeder.size(); ++i) {
        const auto& id = feeder.bus(i).id;
        TimeSeriesTask v(id + ".V", id, Phase::A, Quantity::VoltageMag_pu, {}, {});
        tasks.push_back(noisy(truth_task(feeder, day, v, scada_t)));
    }
    return tasks;
}

}  // namespace gridfuse
