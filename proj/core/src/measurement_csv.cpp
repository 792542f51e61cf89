#include "gridfuse/measurement_csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "gridfuse/error.hpp"

namespace gridfuse {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::vector<std::string_view> split_csv(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        std::string_view f = line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        while (!f.empty() && f.front() == ' ') f.remove_prefix(1);
        while (!f.empty() && f.back() == ' ') f.remove_suffix(1);
        out.push_back(f);
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

double parse_double(std::string_view field, const std::string& source, std::size_t line) {
    double v = 0.0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
        throw ParseError(source, line, "not a number: '" + std::string(field) + "'");
    return v;
}

void write_measurements(std::ostream& os, std::span<const TimeSeriesTask> tasks) {
    os << kMeasurementHeader << '\n';
    for (const auto& task : tasks) {
        const auto q = to_string(task.quantity());
        const auto p = to_string(task.phase());
        for (std::size_t i = 0; i < task.size(); ++i) {
            os << task.task_id() << ',' << task.bus_id() << ',' << p << ',' << q << ','
               << format_double(task.times()[i]) << ',' << format_double(task.values()[i]) << '\n';
        }
    }
}

namespace {

struct PendingTask {
    std::string bus_id;
    Phase phase;
    Quantity quantity;
    std::vector<double> times;
    std::vector<double> values;
};

}  // namespace

std::vector<TimeSeriesTask> read_measurements(std::istream& is, const std::string& source) {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(is, line)) throw ParseError(source, 0, "empty input, header required");
    ++lineno;
    {
        auto header = split_csv(line);
        auto expected = split_csv(kMeasurementHeader);
        if (header != expected)
            throw ParseError(source, lineno, "expected header '" + std::string(kMeasurementHeader) + "'");
    }

    std::vector<std::string> order;
    std::map<std::string, PendingTask> pending;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto f = split_csv(line);
        if (f.size() != 6) throw ParseError(source, lineno, "expected 6 fields, got " + std::to_string(f.size()));
        const std::string id(f[0]);
        if (id.empty()) throw ParseError(source, lineno, "empty task_id");
        auto phase = parse_phase(f[2]);
        if (!phase) throw ParseError(source, lineno, "unknown phase '" + std::string(f[2]) + "'");
        auto quantity = parse_quantity(f[3]);
        if (!quantity)
            throw ParseError(source, lineno,
                             "unknown quantity '" + std::string(f[3]) + "' (expected P_kW, Q_kVAr or V_pu)");
        const double t = parse_double(f[4], source, lineno);
        const double v = parse_double(f[5], source, lineno);

        auto [it, inserted] = pending.try_emplace(id, PendingTask{std::string(f[1]), *phase, *quantity, {}, {}});
        if (inserted) {
            order.push_back(id);
        } else if (it->second.bus_id != f[1] || it->second.phase != *phase || it->second.quantity != *quantity) {
            throw ParseError(source, lineno, "task '" + id + "' changes bus, phase or quantity");
        }
        it->second.times.push_back(t);
        it->second.values.push_back(v);
    }

    std::vector<TimeSeriesTask> tasks;
    tasks.reserve(order.size());
    for (const auto& id : order) {
        auto& p = pending.at(id);
        std::vector<std::size_t> idx(p.times.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return p.times[a] < p.times[b]; });
        std::vector<double> t(idx.size()), v(idx.size());
        for (std::size_t k = 0; k < idx.size(); ++k) {
            t[k] = p.times[idx[k]];
            v[k] = p.values[idx[k]];
            if (k > 0 && t[k] == t[k - 1])
                throw ParseError(source, 0, "task '" + id + "' has duplicate timestamp " + format_double(t[k]));
        }
        try {
            tasks.emplace_back(id, p.bus_id, p.phase, p.quantity, std::move(t), std::move(v));
        } catch (const InvalidArgument& e) {
            throw ParseError(source, 0, e.what());
        }
    }
    return tasks;
}

std::vector<TimeSeriesTask> read_measurements(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), 0, "cannot open file");
    return read_measurements(in, path.string());
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace gridfuse
