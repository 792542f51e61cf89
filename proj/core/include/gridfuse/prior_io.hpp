#pragma once

#include <filesystem>
#include <string>

#include "gridfuse/gp_model.hpp"

namespace gridfuse {

inline constexpr int kPriorFormatVersion = 1;

/// JSON document:
///   {"format_version": 1, "encoding": "time_only", "time_horizon_s": 86400,
///    "kernel": {"log_lengthscale", "log_signal_var", "log_noise_var"},
///    "layer_dims": [...], "weights": [[row-major...], ...], "biases": [[...], ...],
///    "bus_depth": {"701": 0.1, ...}}
std::string prior_to_json(const GpPrior& prior);
GpPrior prior_from_json(const std::string& text, const std::string& source = "<prior>");

void save_prior(const GpPrior& prior, const std::filesystem::path& path);
GpPrior load_prior(const std::filesystem::path& path);

}  // namespace gridfuse
