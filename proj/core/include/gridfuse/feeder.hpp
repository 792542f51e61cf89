#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "gridfuse/timeseries.hpp"

namespace gridfuse {

struct Bus {
    std::string id;
    std::optional<std::string> parent;  // none for the substation
    double load_kw = 0.0;               // nominal peak; zero for non-load buses
};

struct Line {
    std::string from;  // parent side
    std::string to;
    double r_pu = 0.0;
    double x_pu = 0.0;
};

/// Radial single-phase-equivalent feeder. Buses are stored in topological
/// order (every parent precedes its children; index 0 is the substation).
class FeederModel {
public:
    FeederModel(std::vector<Bus> buses, std::vector<Line> lines, double substation_v_pu = 1.0,
                double base_kva = 2500.0);

    std::size_t size() const noexcept { return buses_.size(); }
    const std::vector<Bus>& buses() const noexcept { return buses_; }
    const Bus& bus(std::size_t i) const { return buses_.at(i); }
    std::optional<std::size_t> index_of(const std::string& id) const;
    std::vector<std::string> bus_ids() const;

    /// Parent index of bus i; none for the root.
    std::optional<std::size_t> parent(std::size_t i) const { return parent_.at(i); }
    /// Impedance of the line feeding bus i (zero for the root).
    double r(std::size_t i) const { return r_.at(i); }
    double x(std::size_t i) const { return x_.at(i); }
    int depth(std::size_t i) const { return depth_.at(i); }
    int max_depth() const noexcept { return max_depth_; }

    double substation_v_pu() const noexcept { return substation_v_; }
    double base_kva() const noexcept { return base_kva_; }

    std::vector<std::size_t> load_buses() const;

private:
    std::vector<Bus> buses_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::optional<std::size_t>> parent_;
    std::vector<double> r_, x_;
    std::vector<int> depth_;
    int max_depth_ = 0;
    double substation_v_;
    double base_kva_;
};

/// JSON: {"substation_v_pu": 1.0, "base_kva": 2500,
///        "buses": [{"id", "parent", "load_kw"?}], "lines": [{"from", "to", "r_pu", "x_pu"}]}
/// Rejects cycles, multiple roots and negative impedances with a ParseError
/// that names the offending bus or edge.
FeederModel parse_feeder(const std::string& json_text, const std::string& source = "<feeder>");
FeederModel load_feeder(const std::filesystem::path& path);

/// Path of the bundled 37-bus model in the source tree.
std::filesystem::path bundled_feeder_path();

struct BusLoad {
    double p_pu = 0.0;
    double q_pu = 0.0;
};

struct PowerFlowResult {
    std::vector<double> v_mag;      // per bus, p.u.
    std::vector<double> angle_rad;  // per bus, linearized
    std::vector<double> w;          // squared magnitudes
};

/// LinDistFlow: branch flows aggregate all downstream load, then
///   w_child = w_parent - 2 (r P + x Q),  theta_child = theta_parent - (x P - r Q) / w_parent.
/// Loads are indexed like feeder.buses(). Throws InfeasibleOperatingPoint when
/// any w <= 0.
PowerFlowResult lindistflow_solve(const FeederModel& feeder, std::span<const BusLoad> loads);

inline constexpr std::size_t kMinutesPerDay = 1440;

struct LoadProfile {
    std::string bus_id;
    std::vector<double> p_kw;    // per minute
    std::vector<double> q_kvar;  // per minute
};

/// tan(acos(pf))
double reactive_ratio(double power_factor);

/// Residential double-peak curves for every load bus: base level plus a
/// morning bump near 07:30 and an evening bump near 19:00, with seeded per-bus
/// jitter and slow random fluctuations; q = p tan(acos(pf)). The daily peak of
/// each curve is scaled to the bus's nominal load.
std::vector<LoadProfile> generate_load_profiles(const FeederModel& feeder, std::uint64_t seed, double pf = 0.87);

/// One simulated day: profiles plus per-minute power-flow results.
struct SimulatedDay {
    std::vector<LoadProfile> profiles;
    std::vector<PowerFlowResult> flows;  // kMinutesPerDay entries

    /// Truth at an arbitrary time (linear between minutes) for a bus index.
    double p_kw(const FeederModel& feeder, std::size_t bus, double t) const;
    double q_kvar(const FeederModel& feeder, std::size_t bus, double t) const;
    double v_mag(std::size_t bus, double t) const;
    double angle(std::size_t bus, double t) const;

    /// Index into `profiles` for each feeder bus, -1 when the bus has no load.
    std::vector<int> profile_index;
};

SimulatedDay simulate_day(const FeederModel& feeder, std::uint64_t seed, double pf = 0.87);

struct SamplingConfig {
    double ami_step = 900.0;
    double scada_step = 60.0;
    /// Additive Gaussian noise std as a fraction of each task's own signal std.
    double noise_relative = 0.005;
    std::uint64_t noise_seed = 0;
};

/// AMI P/Q tasks for load buses at ami_step and SCADA |v| tasks for every bus
/// at scada_step. Task ids are "<bus>.P", "<bus>.Q", "<bus>.V"; all phase A.
std::vector<TimeSeriesTask> sample_measurements(const FeederModel& feeder, const SimulatedDay& day,
                                                const SamplingConfig& config);

/// Noiseless truth for the same task identities on an arbitrary time list.
TimeSeriesTask truth_task(const FeederModel& feeder, const SimulatedDay& day, const TimeSeriesTask& identity,
                          std::span<const double> times);

/// Normalized hop depth per bus id, for the task-feature mean encoding.
std::map<std::string, double> normalized_depths(const FeederModel& feeder);

}  // namespace gridfuse
