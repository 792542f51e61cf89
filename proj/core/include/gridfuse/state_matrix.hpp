#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gridfuse/feeder.hpp"
#include "gridfuse/matrix_completion.hpp"

namespace gridfuse {

/// Column order of the per-bus state row.
enum StateColumn : int { kReV = 0, kImV = 1, kVMag = 2, kReS = 3, kImS = 4 };
inline constexpr int kStateColumns = 5;

/// Partial measurements for one bus; unset entries are unobserved. Power is in
/// kW / kVAr, voltage in p.u.
struct BusMeasurement {
    std::string bus_id;
    std::array<std::optional<double>, kStateColumns> entries{};

    static BusMeasurement full(std::string bus_id, std::complex<double> v, std::complex<double> s);
    static BusMeasurement magnitude_only(std::string bus_id, double v_mag);
};

/// n_buses x 5 matrix with an observation mask. Unobserved entries hold NaN.
struct StateMatrix {
    Eigen::MatrixXd values;
    MaskMatrix mask;
    std::vector<std::string> bus_order;

    std::size_t rows() const noexcept { return bus_order.size(); }
    std::size_t observed_count() const { return static_cast<std::size_t>(mask.count()); }
    double density() const;
};

/// Places each measurement in its bus row. Measurements for the same bus are
/// merged; later entries override earlier ones. Throws InvalidArgument for an
/// unknown bus.
StateMatrix build_state_matrix(std::span<const BusMeasurement> snapshot, std::span<const std::string> buses);

struct BusState {
    std::string bus_id;
    std::complex<double> v;
    double v_mag = 0.0;
    std::complex<double> s;
    /// | |v| column - |Re(v) + j Im(v)| |, diagnostic only.
    double consistency_residual = 0.0;
};

std::vector<BusState> extract_states(const Eigen::MatrixXd& completed, std::span<const std::string> bus_order);

/// CSV: bus_id,re_v,im_v,v_mag,re_s,im_s,mask_bits. Unobserved entries are
/// written as "nan" and ignored on read.
inline constexpr std::string_view kSnapshotHeader = "bus_id,re_v,im_v,v_mag,re_s,im_s,mask_bits";
void write_snapshot(std::ostream& os, const StateMatrix& m);
StateMatrix read_snapshot(std::istream& is, const std::string& source = "<snapshot>");

/// Per-bus inputs at one instant, in native units. Missing keys are treated
/// as unavailable.
struct SnapshotInputs {
    std::map<std::string, double> p_kw;
    std::map<std::string, double> q_kvar;
    std::map<std::string, double> v_mag;
};

struct DsseOutput {
    std::vector<BusState> states;
    StateMatrix observed;  // after FAD subsampling
    CompletionResult completion;
};

/// Builds the available state entries, keeps round(fad * 5 * n) of them
/// uniformly at random (or all, when fewer are available), completes the
/// matrix and reads the states back.
///
/// Available entries: P and Q from the inputs at load buses and zero at
/// non-load buses; |v| from the inputs; Re(v) and Im(v) from the input |v| and
/// the LinDistFlow angle of the input loads.
DsseOutput dsse_snapshot(const SnapshotInputs& inputs, const FeederModel& feeder, double fad, std::uint64_t seed,
                         const CompletionConfig& config = {});

/// The entry subsampling used by dsse_snapshot: indices (row * 5 + col) kept.
std::vector<std::size_t> fad_keep(const MaskMatrix& available, double fad, std::uint64_t seed);

}  // namespace gridfuse
