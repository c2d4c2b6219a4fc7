#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "pressurelab/spectrum.hpp"

namespace pressurelab {

/// Minimal standalone SVG of a swept spectrum curve: the alpha axis spans the
/// step-average interval, the vertical axis [0, delta]. Data-only rendering;
/// anything fancier belongs in an external plotter fed by the CSV.
inline std::string spectrum_svg(const SpectrumCurve& curve, int width = 640,
                                int height = 420) {
    const double margin = 48.0;
    const double x_lo = curve.bounds.lower, x_hi = curve.bounds.upper;
    const double y_hi = std::max(curve.delta, 1e-12);
    auto px = [&](double a) {
        return margin + (a - x_lo) / (x_hi - x_lo) * (width - 2 * margin);
    };
    auto py = [&](double d) {
        return height - margin - d / y_hi * (height - 2 * margin);
    };
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
        << height << "\">\n";
    svg << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    // axes
    svg << "  <line x1=\"" << px(x_lo) << "\" y1=\"" << py(0) << "\" x2=\""
        << px(x_hi) << "\" y2=\"" << py(0)
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    svg << "  <line x1=\"" << px(0.0 >= x_lo && 0.0 <= x_hi ? 0.0 : x_lo)
        << "\" y1=\"" << py(0) << "\" x2=\""
        << px(0.0 >= x_lo && 0.0 <= x_hi ? 0.0 : x_lo) << "\" y2=\""
        << py(y_hi) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    // tick labels at the ends and the maximum
    svg << "  <text x=\"" << px(x_lo) << "\" y=\"" << py(0) + 16
        << "\" font-size=\"11\">" << x_lo << "</text>\n";
    svg << "  <text x=\"" << px(x_hi) - 10 << "\" y=\"" << py(0) + 16
        << "\" font-size=\"11\">" << x_hi << "</text>\n";
    svg << "  <text x=\"" << margin - 40 << "\" y=\"" << py(curve.delta) + 4
        << "\" font-size=\"11\">" << curve.delta << "</text>\n";
    svg << "  <polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.6\" points=\"";
    bool first = true;
    for (const auto& pt : curve.points) {
        if (!std::isfinite(pt.delta_root)) continue;
        if (!first) svg << ' ';
        svg << px(pt.alpha) << ',' << py(pt.delta_root);
        first = false;
    }
    svg << "\"/>\n";
    // mark the maximum (alpha_max, delta)
    if (curve.alpha_max >= x_lo && curve.alpha_max <= x_hi)
        svg << "  <circle cx=\"" << px(curve.alpha_max) << "\" cy=\""
            << py(curve.delta) << "\" r=\"3\" fill=\"#9c1f1f\"/>\n";
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace pressurelab
