#include "gridfuse/prior_io.hpp"

#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "gridfuse/error.hpp"
#include "gridfuse/measurement_csv.hpp"

namespace gridfuse {

using nlohmann::json;

namespace {

// JSON has no infinity; a zero noise variance is stored as null.
json log_value(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double read_log_value(const json& j) {
    return j.is_null() ? -std::numeric_limits<double>::infinity() : j.get<double>();
}

}  // namespace

std::string prior_to_json(const GpPrior& prior) {
    json j;
    j["format_version"] = kPriorFormatVersion;
    j["encoding"] = std::string(to_string(prior.encoding));
    j["time_horizon_s"] = prior.time_horizon;
    j["kernel"] = {{"log_lengthscale", log_value(prior.kernel.log_lengthscale)},
                   {"log_signal_var", log_value(prior.kernel.log_signal_var)},
                   {"log_noise_var", log_value(prior.kernel.log_noise_var)}};
    j["layer_dims"] = prior.mean.layer_dims();
    json weights = json::array(), biases = json::array();
    for (std::size_t l = 0; l < prior.mean.layer_count(); ++l) {
        const auto& W = prior.mean.weight(l);
        std::vector<double> w;
        w.reserve(static_cast<std::size_t>(W.size()));
        for (Eigen::Index r = 0; r < W.rows(); ++r)
            for (Eigen::Index c = 0; c < W.cols(); ++c) w.push_back(W(r, c));
        weights.push_back(w);
        const auto& b = prior.mean.bias(l);
        biases.push_back(std::vector<double>(b.data(), b.data() + b.size()));
    }
    j["weights"] = std::move(weights);
    j["biases"] = std::move(biases);
    j["bus_depth"] = prior.bus_depth;
    return j.dump(1) + "\n";
}

GpPrior prior_from_json(const std::string& text, const std::string& source) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(source, 0, e.what());
    }
    try {
        const int version = j.at("format_version").get<int>();
        if (version != kPriorFormatVersion)
            throw ParseError(source, 0, "unsupported format_version " + std::to_string(version));
        GpPrior prior;
        const auto enc = j.at("encoding").get<std::string>();
        if (enc == "time_only")
            prior.encoding = InputEncoding::TimeOnly;
        else if (enc == "time_plus_task_features")
            prior.encoding = InputEncoding::TimePlusTaskFeatures;
        else
            throw ParseError(source, 0, "unknown encoding '" + enc + "'");
        prior.time_horizon = j.value("time_horizon_s", kSecondsPerDay);
        const auto& k = j.at("kernel");
        prior.kernel.log_lengthscale = read_log_value(k.at("log_lengthscale"));
        prior.kernel.log_signal_var = read_log_value(k.at("log_signal_var"));
        prior.kernel.log_noise_var = read_log_value(k.at("log_noise_var"));

        const auto dims = j.at("layer_dims").get<std::vector<int>>();
        if (dims.empty() || dims.front() != GpPrior::input_dim(prior.encoding))
            throw ParseError(source, 0, "layer_dims do not match the input encoding");
        prior.mean = MeanNet(dims);
        const auto& W = j.at("weights");
        const auto& B = j.at("biases");
        if (W.size() != prior.mean.layer_count() || B.size() != prior.mean.layer_count())
            throw ParseError(source, 0, "weights/biases do not match layer_dims");
        for (std::size_t l = 0; l < prior.mean.layer_count(); ++l) {
            const auto w = W[l].get<std::vector<double>>();
            const auto b = B[l].get<std::vector<double>>();
            auto& Wl = prior.mean.weight(l);
            auto& bl = prior.mean.bias(l);
            if (w.size() != static_cast<std::size_t>(Wl.size()) || b.size() != static_cast<std::size_t>(bl.size()))
                throw ParseError(source, 0, "layer " + std::to_string(l) + " has the wrong number of parameters");
            std::size_t idx = 0;
            for (Eigen::Index r = 0; r < Wl.rows(); ++r)
                for (Eigen::Index c = 0; c < Wl.cols(); ++c) Wl(r, c) = w[idx++];
            for (Eigen::Index r = 0; r < bl.size(); ++r) bl[r] = b[static_cast<std::size_t>(r)];
        }
        if (j.contains("bus_depth")) prior.bus_depth = j.at("bus_depth").get<std::map<std::string, double>>();
        return prior;
    } catch (const json::exception& e) {
        throw ParseError(source, 0, e.what());
    } catch (const InvalidArgument& e) {
        throw ParseError(source, 0, e.what());
    }
}

void save_prior(const GpPrior& prior, const std::filesystem::path& path) {
    write_file_atomic(path, prior_to_json(prior));
}

GpPrior load_prior(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), 0, "cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    return prior_from_json(ss.str(), path.string());
}

}  // namespace gridfuse
