#include "gridfuse/imputation.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <ostream>

#include "gridfuse/error.hpp"
#include "gridfuse/measurement_csv.hpp"

namespace gridfuse {

std::string_view to_string(ImputationMethod m) {
    return m == ImputationMethod::Gp ? "gp" : "linear";
}

std::optional<ImputationMethod> parse_method(std::string_view s) {
    if (s == "gp") return ImputationMethod::Gp;
    if (s == "linear") return ImputationMethod::Linear;
    return std::nullopt;
}

PosteriorPrediction impute_gp(const GpPrior& prior, const TimeSeriesTask& observed,
                              std::span<const double> query_times, double level) {
    if (observed.empty()) throw NoDataError("impute_gp: task " + observed.task_id() + " has no observations");
    const auto [z, scale] = standardize_task(observed);
    PosteriorPrediction pred = posterior_predict(prior, z, query_times, false, level);
    const double s2 = scale.stddev * scale.stddev;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        pred.mean[i] = scale.invert(pred.mean[i]);
        pred.variance[i] *= s2;
        pred.ci_halfwidth[i] *= scale.stddev;
        if (auto k = observed.find_time(query_times[i])) pred.mean[i] = observed.values()[*k];
    }
    return pred;
}

ImputedSeries impute(ImputationMethod method, const GpPrior* prior, const TimeSeriesTask& observed,
                     std::span<const double> query_times) {
    ImputedSeries out;
    out.times.assign(query_times.begin(), query_times.end());
    if (method == ImputationMethod::Linear) {
        out.mean = linear_interpolate(observed, query_times);
        return out;
    }
    if (prior == nullptr) throw InvalidArgument("impute: GP method requires a trained prior");
    auto pred = impute_gp(*prior, observed, query_times);
    out.stddev = pred.stddev();
    out.mean = std::move(pred.mean);
    return out;
}

void write_imputed(std::ostream& os, std::span<const ImputedTask> tasks) {
    os << kImputedHeader << '\n';
    for (const auto& t : tasks) {
        const auto& s = t.series;
        if (s.mean.size() != s.times.size() || (!s.stddev.empty() && s.stddev.size() != s.times.size()))
            throw InvalidArgument("write_imputed: series '" + t.task_id + "' has mismatched lengths");
        for (std::size_t i = 0; i < s.times.size(); ++i)
            os << t.task_id << ',' << format_double(s.times[i]) << ',' << format_double(s.mean[i]) << ','
               << (s.stddev.empty() ? std::string("nan") : format_double(s.stddev[i])) << '\n';
    }
}

std::vector<ImputedTask> read_imputed(std::istream& is, const std::string& source) {
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(is, line)) throw ParseError(source, 1, "empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kImputedHeader) throw ParseError(source, 1, "expected header '" + std::string(kImputedHeader) + "'");

    std::vector<ImputedTask> out;
    std::map<std::string, std::size_t> index;
    std::vector<bool> has_std;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 4) throw ParseError(source, lineno, "expected 4 fields, got " + std::to_string(f.size()));
        const std::string id(f[0]);
        if (id.empty()) throw ParseError(source, lineno, "empty task_id");
        auto [it, fresh] = index.try_emplace(id, out.size());
        if (fresh) {
            out.push_back({id, {}});
            has_std.push_back(f[3] != "nan");
        }
        auto& s = out[it->second].series;
        const double t = parse_double(f[1], source, lineno);
        if (!s.times.empty() && !(t > s.times.back()))
            throw ParseError(source, lineno, "timestamps of '" + id + "' must be strictly increasing");
        s.times.push_back(t);
        s.mean.push_back(parse_double(f[2], source, lineno));
        const bool row_std = f[3] != "nan";
        if (row_std != has_std[it->second])
            throw ParseError(source, lineno, "task '" + id + "' mixes numeric and nan std values");
        if (row_std) s.stddev.push_back(parse_double(f[3], source, lineno));
    }
    return out;
}

std::vector<ImputedTask> read_imputed(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw InvalidArgument("cannot open imputed file '" + path.string() + "'");
    return read_imputed(is, path.string());
}

}  // namespace gridfuse
