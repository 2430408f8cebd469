#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "jackson/io.hpp"

// Self-contained SVG bar and line charts. No plotting dependency: the CLI
// must produce byte-deterministic figures, so everything is emitted from
// fixed-precision coordinates.

namespace jackson {
namespace svg {

inline constexpr double kWidth = 640.0;
inline constexpr double kHeight = 400.0;
inline constexpr double kMarginLeft = 70.0;
inline constexpr double kMarginRight = 20.0;
inline constexpr double kMarginTop = 40.0;
inline constexpr double kMarginBottom = 50.0;

namespace detail {

inline std::string header(const std::string& title) {
    std::string out =
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" "
        "viewBox=\"0 0 640 400\">\n";
    out += "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
    out += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">" +
           title + "</text>\n";
    return out;
}

inline std::string axes() {
    std::string out;
    out += "<line x1=\"" + format_coord(kMarginLeft) + "\" y1=\"" +
           format_coord(kHeight - kMarginBottom) + "\" x2=\"" +
           format_coord(kWidth - kMarginRight) + "\" y2=\"" +
           format_coord(kHeight - kMarginBottom) + "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + format_coord(kMarginLeft) + "\" y1=\"" + format_coord(kMarginTop) +
           "\" x2=\"" + format_coord(kMarginLeft) + "\" y2=\"" +
           format_coord(kHeight - kMarginBottom) + "\" stroke=\"black\"/>\n";
    return out;
}

inline std::string y_label(double value, double y) {
    return "<text x=\"" + format_coord(kMarginLeft - 6.0) + "\" y=\"" + format_coord(y + 4.0) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
           format_coord(value) + "</text>\n";
}

}  // namespace detail

/// Bars keyed by label (one per receiver or queue).
inline std::string bar_chart(const std::string& title, const std::vector<std::string>& labels,
                             const std::vector<double>& values) {
    std::string out = detail::header(title);
    out += detail::axes();
    double top = 0.0;
    for (double v : values) top = std::max(top, v);
    if (top <= 0.0) top = 1.0;

    const double plot_width = kWidth - kMarginLeft - kMarginRight;
    const double plot_height = kHeight - kMarginTop - kMarginBottom;
    const double slot = plot_width / static_cast<double>(values.size());
    const double bar = slot * 0.7;

    out += detail::y_label(0.0, kHeight - kMarginBottom);
    out += detail::y_label(top, kMarginTop);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double h = std::max(0.0, values[i]) / top * plot_height;
        const double x = kMarginLeft + slot * (static_cast<double>(i) + 0.15);
        const double y = kHeight - kMarginBottom - h;
        out += "<rect x=\"" + format_coord(x) + "\" y=\"" + format_coord(y) + "\" width=\"" +
               format_coord(bar) + "\" height=\"" + format_coord(h) +
               "\" fill=\"steelblue\"/>\n";
        out += "<text x=\"" + format_coord(x + bar / 2.0) + "\" y=\"" +
               format_coord(kHeight - kMarginBottom + 16.0) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
               labels[i] + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

/// Polyline through (x, y) points; optionally plots log10(y) for decay views.
inline std::string line_chart(const std::string& title, const std::vector<double>& xs,
                              const std::vector<double>& ys, bool log_y = false) {
    std::string out = detail::header(title);
    out += detail::axes();
    std::vector<double> plotted;
    plotted.reserve(ys.size());
    for (double y : ys) plotted.push_back(log_y ? std::log10(std::max(y, 1e-300)) : y);

    double lo = plotted.empty() ? 0.0 : plotted.front();
    double hi = lo;
    for (double v : plotted) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi - lo < 1e-12) hi = lo + 1.0;
    double x_lo = xs.empty() ? 0.0 : xs.front();
    double x_hi = xs.empty() ? 1.0 : xs.back();
    if (x_hi - x_lo < 1e-12) x_hi = x_lo + 1.0;

    const double plot_width = kWidth - kMarginLeft - kMarginRight;
    const double plot_height = kHeight - kMarginTop - kMarginBottom;
    out += detail::y_label(log_y ? std::pow(10.0, lo) : lo, kHeight - kMarginBottom);
    out += detail::y_label(log_y ? std::pow(10.0, hi) : hi, kMarginTop);

    std::string points;
    for (std::size_t i = 0; i < plotted.size(); ++i) {
        const double px = kMarginLeft + (xs[i] - x_lo) / (x_hi - x_lo) * plot_width;
        const double py = kHeight - kMarginBottom - (plotted[i] - lo) / (hi - lo) * plot_height;
        if (!points.empty()) points += " ";
        points += format_coord(px) + "," + format_coord(py);
    }
    out += "<polyline points=\"" + points + "\" fill=\"none\" stroke=\"steelblue\" "
           "stroke-width=\"1.5\"/>\n";
    out += "</svg>\n";
    return out;
}

}  // namespace svg
}  // namespace jackson
