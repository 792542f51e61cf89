#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gridfuse::cli {

struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    /// Draw as point markers instead of a polyline.
    bool markers = false;
};

struct PlotBand {
    std::string name = "95% CI";
    std::vector<double> x;
    std::vector<double> lower;
    std::vector<double> upper;
};

struct PlotOptions {
    std::string title;
    std::string x_label = "time (h)";
    std::string y_label;
    /// Applied to x values before plotting (seconds to hours by default).
    double x_scale = 1.0 / 3600.0;
    int width = 800;
    int height = 420;
};

/// Standalone SVG with axes, ticks and a legend. Each line series is one
/// <polyline>; the band, when present, is one filled <path> drawn before the
/// series. Output depends only on the inputs.
///
/// Throws InvalidArgument for an empty series list, empty or mismatched
/// series, or non-finite values.
std::string emit_svg_plot(std::span<const PlotSeries> series, const std::optional<PlotBand>& band = std::nullopt,
                          const PlotOptions& options = {});

}  // namespace gridfuse::cli
