#pragma once

#include <string>
#include <vector>

namespace sigest {

// One log-log panel: scatter points, a fitted line, and a dashed bound line.
struct SvgPanel {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<std::pair<double, double>> points;  // (x, y), both > 0
    double fit_slope = 0.0;
    double fit_intercept = 0.0;  // log10 y = intercept + slope * log10 x
    double bound_slope = 0.0;    // dashed line, anchored at the first point
};

// Self-contained SVG 1.1 document with the panels side by side.
std::string render_loglog_svg(const std::vector<SvgPanel>& panels);

}  // namespace sigest
