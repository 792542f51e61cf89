#include "gridfuse/cli/svg_plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "gridfuse/error.hpp"

namespace gridfuse::cli {

namespace {

constexpr std::array<const char*, 6> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
constexpr double kMarginLeft = 70, kMarginRight = 160, kMarginTop = 40, kMarginBottom = 50;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    std::string s(buf);
    if (s == "-0.00") s = "0.00";
    return s;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

/// Round step of the 1-2-5 family giving about `target` ticks.
double nice_step(double span, int target) {
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (raw <= m * mag) return m * mag;
    return 10.0 * mag;
}

struct Range {
    double lo = INFINITY, hi = -INFINITY;
    void add(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
            const double d = std::max(1e-6, 0.05 * std::abs(hi));
            lo -= d;
            hi += d;
        } else {
            const double d = 0.05 * (hi - lo);
            lo -= d;
            hi += d;
        }
    }
};

void check_finite(std::span<const double> v, const std::string& what) {
    for (double x : v)
        if (!std::isfinite(x)) throw InvalidArgument("emit_svg_plot: non-finite value in " + what);
}

}  // namespace

std::string emit_svg_plot(std::span<const PlotSeries> series, const std::optional<PlotBand>& band,
                          const PlotOptions& options) {
    if (series.empty()) throw InvalidArgument("emit_svg_plot: at least one series is required");
    if (options.width <= kMarginLeft + kMarginRight || options.height <= kMarginTop + kMarginBottom)
        throw InvalidArgument("emit_svg_plot: canvas too small");

    Range xr, yr;
    for (const auto& s : series) {
        if (s.x.empty() || s.x.size() != s.y.size())
            throw InvalidArgument("emit_svg_plot: series '" + s.name + "' is empty or has mismatched lengths");
        check_finite(s.x, s.name);
        check_finite(s.y, s.name);
        for (double v : s.x) xr.add(v * options.x_scale);
        for (double v : s.y) yr.add(v);
    }
    if (band) {
        if (band->x.empty() || band->lower.size() != band->x.size() || band->upper.size() != band->x.size())
            throw InvalidArgument("emit_svg_plot: band is empty or has mismatched lengths");
        check_finite(band->x, "band");
        check_finite(band->lower, "band");
        check_finite(band->upper, "band");
        for (double v : band->x) xr.add(v * options.x_scale);
        for (double v : band->lower) yr.add(v);
        for (double v : band->upper) yr.add(v);
    }
    yr.pad();
    if (xr.hi - xr.lo < 1e-12) xr.pad();

    const double W = options.width, H = options.height;
    const double pw = W - kMarginLeft - kMarginRight, ph = H - kMarginTop - kMarginBottom;
    auto px = [&](double x) { return kMarginLeft + (x * options.x_scale - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto py = [&](double y) { return kMarginTop + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

    std::string o;
    o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(options.width) + "\" height=\"" +
         std::to_string(options.height) + "\" viewBox=\"0 0 " + std::to_string(options.width) + " " +
         std::to_string(options.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o += "<rect x=\"0\" y=\"0\" width=\"" + num(W) + "\" height=\"" + num(H) + "\" fill=\"white\"/>\n";
    if (!options.title.empty())
        o += "<text x=\"" + num(kMarginLeft + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" +
             escape(options.title) + "</text>\n";

    // Axes and ticks.
    o += "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">\n";
    o += "<line x1=\"" + num(kMarginLeft) + "\" y1=\"" + num(kMarginTop + ph) + "\" x2=\"" + num(kMarginLeft + pw) +
         "\" y2=\"" + num(kMarginTop + ph) + "\"/>\n";
    o += "<line x1=\"" + num(kMarginLeft) + "\" y1=\"" + num(kMarginTop) + "\" x2=\"" + num(kMarginLeft) +
         "\" y2=\"" + num(kMarginTop + ph) + "\"/>\n";
    o += "</g>\n<g class=\"ticks\" font-size=\"10\">\n";
    const double xs = nice_step(xr.hi - xr.lo, 8);
    for (double v = std::ceil(xr.lo / xs) * xs; v <= xr.hi + 1e-9 * xs; v += xs) {
        const double x = kMarginLeft + (v - xr.lo) / (xr.hi - xr.lo) * pw;
        o += "<line x1=\"" + num(x) + "\" y1=\"" + num(kMarginTop + ph) + "\" x2=\"" + num(x) + "\" y2=\"" +
             num(kMarginTop + ph + 4) + "\" stroke=\"black\"/>";
        o += "<text x=\"" + num(x) + "\" y=\"" + num(kMarginTop + ph + 16) + "\" text-anchor=\"middle\">" +
             tick_label(v) + "</text>\n";
    }
    const double ys = nice_step(yr.hi - yr.lo, 6);
    for (double v = std::ceil(yr.lo / ys) * ys; v <= yr.hi + 1e-9 * ys; v += ys) {
        const double y = py(v);
        o += "<line x1=\"" + num(kMarginLeft - 4) + "\" y1=\"" + num(y) + "\" x2=\"" + num(kMarginLeft) +
             "\" y2=\"" + num(y) + "\" stroke=\"black\"/>";
        o += "<text x=\"" + num(kMarginLeft - 6) + "\" y=\"" + num(y + 3) + "\" text-anchor=\"end\">" +
             tick_label(v) + "</text>\n";
    }
    o += "</g>\n";
    o += "<text x=\"" + num(kMarginLeft + pw / 2) + "\" y=\"" + num(H - 12) + "\" text-anchor=\"middle\">" +
         escape(options.x_label) + "</text>\n";
    o += "<text x=\"16\" y=\"" + num(kMarginTop + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         num(kMarginTop + ph / 2) + ")\">" + escape(options.y_label) + "</text>\n";

    if (band) {
        std::string d = "M";
        for (std::size_t i = 0; i < band->x.size(); ++i)
            d += (i ? " L" : "") + num(px(band->x[i])) + "," + num(py(band->upper[i]));
        for (std::size_t i = band->x.size(); i-- > 0;) d += " L" + num(px(band->x[i])) + "," + num(py(band->lower[i]));
        d += " Z";
        o += "<path class=\"band\" d=\"" + d + "\" fill=\"#1f77b4\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
    }

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = kPalette[k % kPalette.size()];
        if (s.markers) {
            o += "<g class=\"markers\" fill=\"" + std::string(color) + "\">\n";
            for (std::size_t i = 0; i < s.x.size(); ++i)
                o += "<circle cx=\"" + num(px(s.x[i])) + "\" cy=\"" + num(py(s.y[i])) + "\" r=\"2.5\"/>\n";
            o += "</g>\n";
            continue;
        }
        std::string pts;
        for (std::size_t i = 0; i < s.x.size(); ++i) pts += (i ? " " : "") + num(px(s.x[i])) + "," + num(py(s.y[i]));
        o += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\"/>\n";
    }

    // Legend: swatches are rects so the polyline count matches the series count.
    o += "<g class=\"legend\">\n";
    double ly = kMarginTop + 10;
    const double lx = kMarginLeft + pw + 15;
    auto entry = [&](const std::string& label, const std::string& fill, const std::string& extra) {
        o += "<rect x=\"" + num(lx) + "\" y=\"" + num(ly - 8) + "\" width=\"14\" height=\"10\" fill=\"" + fill +
             "\"" + extra + "/>";
        o += "<text x=\"" + num(lx + 20) + "\" y=\"" + num(ly + 1) + "\">" + escape(label) + "</text>\n";
        ly += 18;
    };
    for (std::size_t k = 0; k < series.size(); ++k) entry(series[k].name, kPalette[k % kPalette.size()], "");
    if (band) entry(band->name, "#1f77b4", " fill-opacity=\"0.2\"");
    o += "</g>\n</svg>\n";
    return o;
}

}  // namespace gridfuse::cli
