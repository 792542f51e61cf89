#include "gridfuse/result_table.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <istream>
#include <sstream>

#include "gridfuse/error.hpp"
#include "gridfuse/measurement_csv.hpp"

namespace gridfuse {

namespace {

std::string describe(const ResultKey& k) {
    return k.method + "/" + k.quantity + "/" + k.sweep_name + "=" + format_double(k.sweep_value) + "/" + k.metric;
}

void check_value(double v, const ResultKey& key) {
    if (!std::isfinite(v) || v < 0.0)
        throw InvalidArgument("ResultTable: cell " + describe(key) + " must be finite and >= 0, got " +
                              format_double(v));
}

void check_label(const std::string& s, const ResultKey& key) {
    if (s.empty() || s.find_first_of(",\"\r\n") != std::string::npos)
        throw InvalidArgument("ResultTable: cell " + describe(key) + " has an empty label or one containing a comma, quote or newline");
}

}  // namespace

void ResultTable::add(ResultKey key, std::vector<double> per_trial) {
    if (per_trial.empty()) throw InvalidArgument("ResultTable: cell " + describe(key) + " has no trials");
    for (double v : per_trial) check_value(v, key);
    const double n = static_cast<double>(per_trial.size());
    double mean = 0.0;
    for (double v : per_trial) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : per_trial) ss += (v - mean) * (v - mean);
    ResultCell cell;
    cell.key = std::move(key);
    cell.value = mean;
    cell.trial_std = per_trial.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    cell.per_trial = std::move(per_trial);
    add_cell(std::move(cell));
}

void ResultTable::add_cell(ResultCell cell) {
    check_value(cell.value, cell.key);
    check_value(cell.trial_std, cell.key);
    for (const auto* l : {&cell.key.method, &cell.key.quantity, &cell.key.sweep_name, &cell.key.metric})
        check_label(*l, cell.key);
    if (!std::isfinite(cell.key.sweep_value)) throw InvalidArgument("ResultTable: sweep value must be finite");
    if (find(cell.key)) throw InvalidArgument("ResultTable: duplicate cell " + describe(cell.key));
    cells_.push_back(std::move(cell));
}

void ResultTable::append(const ResultTable& other) {
    for (const auto& c : other.cells_) add_cell(c);
}

const ResultCell* ResultTable::find(const ResultKey& key) const {
    auto it = std::find_if(cells_.begin(), cells_.end(), [&](const ResultCell& c) { return c.key == key; });
    return it == cells_.end() ? nullptr : &*it;
}

const ResultCell& ResultTable::at(const ResultKey& key) const {
    if (const auto* c = find(key)) return *c;
    throw InvalidArgument("ResultTable: no cell " + describe(key));
}

std::string ResultTable::to_csv() const {
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto& c : cells_) {
        out += c.key.method + ',' + c.key.quantity + ',' + c.key.sweep_name + ',' + format_double(c.key.sweep_value) +
               ',' + c.key.metric + ',' + format_double(c.value) +
               ',' + format_double(c.trial_std) + '\n';
    }
    return out;
}

std::string ResultTable::to_text() const {
    static const std::vector<std::string> header = {"method", "quantity", "sweep", "value", "metric", "mean", "std"};
    std::vector<std::vector<std::string>> rows;
    rows.push_back(header);
    for (const auto& c : cells_) {
        char mean[32], sd[32], sv[32];
        std::snprintf(mean, sizeof mean, "%.6g", c.value);
        std::snprintf(sd, sizeof sd, "%.3g", c.trial_std);
        std::snprintf(sv, sizeof sv, "%g", c.key.sweep_value);
        rows.push_back({c.key.method, c.key.quantity, c.key.sweep_name, sv, c.key.metric, mean, sd});
    }
    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& r : rows)
        for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());

    std::string out;
    auto emit = [&](const std::vector<std::string>& r) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            const bool numeric = i >= 3 && i != 4;
            const std::string pad(width[i] - r[i].size(), ' ');
            out += numeric ? pad + r[i] : r[i] + pad;
            out += i + 1 < r.size() ? "  " : "";
        }
        while (!out.empty() && out.back() == ' ') out.pop_back();
        out += '\n';
    };
    emit(rows[0]);
    std::size_t total = 0;
    for (auto w : width) total += w + 2;
    out += std::string(total - 2, '-') + '\n';
    for (std::size_t i = 1; i < rows.size(); ++i) emit(rows[i]);
    return out;
}

ResultTable ResultTable::from_csv(std::istream& is, const std::string& source) {
    ResultTable table;
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(is, line)) throw ParseError(source, 1, "empty result table");
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader) throw ParseError(source, lineno, "unexpected header '" + line + "'");
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 7) throw ParseError(source, lineno, "expected 7 fields, got " + std::to_string(f.size()));
        ResultCell cell;
        cell.key = {std::string(f[0]), std::string(f[1]), std::string(f[2]), parse_double(f[3], source, lineno),
                    std::string(f[4])};
        cell.value = parse_double(f[5], source, lineno);
        cell.trial_std = parse_double(f[6], source, lineno);
        try {
            table.add_cell(std::move(cell));
        } catch (const InvalidArgument& e) {
            throw ParseError(source, lineno, e.what());
        }
    }
    return table;
}

}  // namespace gridfuse
