#include "gridfuse/state_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <unordered_map>

#include "gridfuse/error.hpp"
#include "gridfuse/measurement_csv.hpp"

namespace gridfuse {

BusMeasurement BusMeasurement::full(std::string bus_id, std::complex<double> v, std::complex<double> s) {
    BusMeasurement m{std::move(bus_id), {}};
    m.entries = {v.real(), v.imag(), std::abs(v), s.real(), s.imag()};
    return m;
}

BusMeasurement BusMeasurement::magnitude_only(std::string bus_id, double v_mag) {
    BusMeasurement m{std::move(bus_id), {}};
    m.entries[kVMag] = v_mag;
    return m;
}

double StateMatrix::density() const {
    if (rows() == 0) return 0.0;
    return static_cast<double>(observed_count()) / static_cast<double>(kStateColumns * rows());
}

StateMatrix build_state_matrix(std::span<const BusMeasurement> snapshot, std::span<const std::string> buses) {
    std::unordered_map<std::string, Eigen::Index> row;
    for (std::size_t i = 0; i < buses.size(); ++i)
        if (!row.emplace(buses[i], static_cast<Eigen::Index>(i)).second)
            throw InvalidArgument("build_state_matrix: duplicate bus '" + buses[i] + "'");

    StateMatrix m;
    const auto n = static_cast<Eigen::Index>(buses.size());
    m.values = Eigen::MatrixXd::Constant(n, kStateColumns, std::numeric_limits<double>::quiet_NaN());
    m.mask = MaskMatrix::Constant(n, kStateColumns, false);
    m.bus_order.assign(buses.begin(), buses.end());
    for (const auto& meas : snapshot) {
        auto it = row.find(meas.bus_id);
        if (it == row.end()) throw InvalidArgument("build_state_matrix: unknown bus '" + meas.bus_id + "'");
        for (int c = 0; c < kStateColumns; ++c)
            if (meas.entries[c]) {
                if (!std::isfinite(*meas.entries[c]))
                    throw InvalidArgument("build_state_matrix: non-finite value at bus '" + meas.bus_id + "'");
                m.values(it->second, c) = *meas.entries[c];
                m.mask(it->second, c) = true;
            }
    }
    return m;
}

std::vector<BusState> extract_states(const Eigen::MatrixXd& completed, std::span<const std::string> bus_order) {
    if (completed.cols() != kStateColumns || completed.rows() != static_cast<Eigen::Index>(bus_order.size()))
        throw InvalidArgument("extract_states: expected a " + std::to_string(bus_order.size()) + " x 5 matrix");
    std::vector<BusState> out;
    out.reserve(bus_order.size());
    for (std::size_t i = 0; i < bus_order.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        BusState s;
        s.bus_id = bus_order[i];
        s.v = {completed(r, kReV), completed(r, kImV)};
        s.v_mag = completed(r, kVMag);
        s.s = {completed(r, kReS), completed(r, kImS)};
        s.consistency_residual = std::abs(s.v_mag - std::abs(s.v));
        out.push_back(std::move(s));
    }
    return out;
}

void write_snapshot(std::ostream& os, const StateMatrix& m) {
    os << kSnapshotHeader << '\n';
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        os << m.bus_order[i];
        std::string bits;
        for (int c = 0; c < kStateColumns; ++c) {
            os << ',' << (m.mask(r, c) ? format_double(m.values(r, c)) : std::string("nan"));
            bits += m.mask(r, c) ? '1' : '0';
        }
        os << ',' << bits << '\n';
    }
}

StateMatrix read_snapshot(std::istream& is, const std::string& source) {
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(is, line) || split_csv(line) != split_csv(kSnapshotHeader))
        throw ParseError(source, 1, "expected header '" + std::string(kSnapshotHeader) + "'");
    std::vector<BusMeasurement> meas;
    std::vector<std::string> buses;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv(line);
        if (f.size() != 7) throw ParseError(source, lineno, "expected 7 fields");
        const auto bits = f[6];
        if (bits.size() != 5 || bits.find_first_not_of("01") != std::string_view::npos)
            throw ParseError(source, lineno, "mask_bits must be five 0/1 characters");
        BusMeasurement m{std::string(f[0]), {}};
        for (int c = 0; c < kStateColumns; ++c)
            if (bits[static_cast<std::size_t>(c)] == '1') m.entries[c] = parse_double(f[1 + c], source, lineno);
        buses.push_back(m.bus_id);
        meas.push_back(std::move(m));
    }
    try {
        return build_state_matrix(meas, buses);
    } catch (const InvalidArgument& e) {
        throw ParseError(source, 0, e.what());
    }
}

std::vector<std::size_t> fad_keep(const MaskMatrix& available, double fad, std::uint64_t seed) {
    if (!(fad > 0.0 && fad <= 1.0)) throw InvalidArgument("FAD must lie in (0, 1]");
    std::vector<std::size_t> pool;
    for (Eigen::Index i = 0; i < available.rows(); ++i)
        for (Eigen::Index c = 0; c < available.cols(); ++c)
            if (available(i, c)) pool.push_back(static_cast<std::size_t>(i * available.cols() + c));
    const auto target = static_cast<std::size_t>(std::llround(fad * static_cast<double>(available.size())));
    if (target >= pool.size()) return pool;
    std::mt19937_64 rng(seed);
    for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[rng() % i]);
    pool.resize(target);
    std::sort(pool.begin(), pool.end());
    return pool;
}

DsseOutput dsse_snapshot(const SnapshotInputs& inputs, const FeederModel& feeder, double fad, std::uint64_t seed,
                         const CompletionConfig& config) {
    if (!(fad > 0.0 && fad <= 1.0)) throw InvalidArgument("dsse_snapshot: FAD must lie in (0, 1]");
    const std::size_t n = feeder.size();

    auto lookup = [](const std::map<std::string, double>& m, const std::string& k) -> std::optional<double> {
        auto it = m.find(k);
        if (it == m.end()) return std::nullopt;
        return it->second;
    };

    // Angles from the linearized flow of the supplied loads. Without a full
    // load picture the angle is unknown and Re/Im stay unavailable.
    std::vector<BusLoad> loads(n);
    bool loads_complete = true;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& b = feeder.bus(i);
        if (b.load_kw <= 0.0) continue;
        auto p = lookup(inputs.p_kw, b.id);
        auto q = lookup(inputs.q_kvar, b.id);
        if (!p || !q) {
            loads_complete = false;
            continue;
        }
        loads[i] = {*p / feeder.base_kva(), *q / feeder.base_kva()};
    }
    std::optional<PowerFlowResult> flow;
    if (loads_complete) flow = lindistflow_solve(feeder, loads);

    std::vector<BusMeasurement> avail;
    avail.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& b = feeder.bus(i);
        BusMeasurement m{b.id, {}};
        if (b.load_kw > 0.0) {
            m.entries[kReS] = lookup(inputs.p_kw, b.id);
            m.entries[kImS] = lookup(inputs.q_kvar, b.id);
        } else {
            m.entries[kReS] = 0.0;
            m.entries[kImS] = 0.0;
        }
        if (auto v = lookup(inputs.v_mag, b.id)) {
            m.entries[kVMag] = *v;
            if (flow) {
                const double th = flow->angle_rad[i];
                m.entries[kReV] = *v * std::cos(th);
                m.entries[kImV] = *v * std::sin(th);
            }
        }
        avail.push_back(std::move(m));
    }
    const auto ids = feeder.bus_ids();
    const StateMatrix full = build_state_matrix(avail, ids);

    DsseOutput out;
    out.observed = full;
    out.observed.mask.setConstant(false);
    out.observed.values.setConstant(std::numeric_limits<double>::quiet_NaN());
    for (std::size_t k : fad_keep(full.mask, fad, seed)) {
        const auto r = static_cast<Eigen::Index>(k / kStateColumns);
        const auto c = static_cast<Eigen::Index>(k % kStateColumns);
        out.observed.mask(r, c) = true;
        out.observed.values(r, c) = full.values(r, c);
    }
    out.completion = complete_matrix(out.observed.values, out.observed.mask, config);
    out.states = extract_states(out.completion.completed, ids);
    return out;
}

}  // namespace gridfuse
