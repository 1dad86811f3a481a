#include "sigest/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace sigest {

namespace {

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct Axis {
    double lo, hi;  // log10 range
    double to_px(double logv, double px0, double px1) const {
        return px0 + (logv - lo) / (hi - lo) * (px1 - px0);
    }
};

Axis make_axis(double lo, double hi) {
    if (hi - lo < 1e-9) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = 0.06 * (hi - lo);
    return {lo - pad, hi + pad};
}

}  // namespace

std::string render_loglog_svg(const std::vector<SvgPanel>& panels) {
    const double pw = 320.0, ph = 300.0, ml = 56.0, mr = 14.0, mt = 34.0, mb = 46.0;
    const double W = pw * static_cast<double>(panels.size());
    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fmt(W) +
         "\" height=\"" + fmt(ph) + "\" viewBox=\"0 0 " + fmt(W) + " " + fmt(ph) + "\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (std::size_t p = 0; p < panels.size(); ++p) {
        const SvgPanel& pan = panels[p];
        const double off = pw * static_cast<double>(p);
        const double x0 = off + ml, x1 = off + pw - mr;
        const double y0 = ph - mb, y1 = mt;  // pixel y grows downward

        double lx_min = 1e300, lx_max = -1e300, ly_min = 1e300, ly_max = -1e300;
        for (auto [x, y] : pan.points) {
            lx_min = std::min(lx_min, std::log10(x));
            lx_max = std::max(lx_max, std::log10(x));
            ly_min = std::min(ly_min, std::log10(y));
            ly_max = std::max(ly_max, std::log10(y));
        }
        if (pan.points.empty()) {
            lx_min = ly_min = 0;
            lx_max = ly_max = 1;
        }
        // Include the bound line's extent in the y range.
        if (!pan.points.empty()) {
            const double by0 = std::log10(pan.points.front().second);
            const double bx0 = std::log10(pan.points.front().first);
            const double by1 = by0 + pan.bound_slope * (lx_max - bx0);
            ly_min = std::min(ly_min, std::min(by0, by1));
            ly_max = std::max(ly_max, std::max(by0, by1));
        }
        const Axis ax = make_axis(lx_min, lx_max);
        const Axis ay = make_axis(ly_min, ly_max);

        s += "<rect x=\"" + fmt(x0) + "\" y=\"" + fmt(y1) + "\" width=\"" + fmt(x1 - x0) +
             "\" height=\"" + fmt(y0 - y1) +
             "\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n";
        s += "<text x=\"" + fmt(off + pw / 2) + "\" y=\"18\" font-family=\"sans-serif\" font-size=\"13\""
             " text-anchor=\"middle\">" + pan.title + "</text>\n";
        s += "<text x=\"" + fmt(off + pw / 2) + "\" y=\"" + fmt(ph - 10) +
             "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" + pan.x_label +
             "</text>\n";
        s += "<text x=\"" + fmt(off + 14) + "\" y=\"" + fmt((y0 + y1) / 2) +
             "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\" transform=\"rotate(-90 " +
             fmt(off + 14) + " " + fmt((y0 + y1) / 2) + ")\">" + pan.y_label + "</text>\n";

        // Decade ticks.
        for (int e = static_cast<int>(std::ceil(ax.lo)); e <= static_cast<int>(std::floor(ax.hi)); ++e) {
            const double px = ax.to_px(e, x0, x1);
            s += "<line x1=\"" + fmt(px) + "\" y1=\"" + fmt(y0) + "\" x2=\"" + fmt(px) + "\" y2=\"" +
                 fmt(y0 + 4) + "\" stroke=\"#333\"/>\n";
            s += "<text x=\"" + fmt(px) + "\" y=\"" + fmt(y0 + 16) +
                 "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">1e" +
                 std::to_string(e) + "</text>\n";
        }
        for (int e = static_cast<int>(std::ceil(ay.lo)); e <= static_cast<int>(std::floor(ay.hi)); ++e) {
            const double py = ph - mb - (e - ay.lo) / (ay.hi - ay.lo) * (y0 - y1);
            s += "<line x1=\"" + fmt(x0 - 4) + "\" y1=\"" + fmt(py) + "\" x2=\"" + fmt(x0) + "\" y2=\"" +
                 fmt(py) + "\" stroke=\"#333\"/>\n";
            s += "<text x=\"" + fmt(x0 - 7) + "\" y=\"" + fmt(py + 3) +
                 "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">1e" +
                 std::to_string(e) + "</text>\n";
        }

        auto ypx = [&](double logy) { return y0 - (logy - ay.lo) / (ay.hi - ay.lo) * (y0 - y1); };

        // Fitted line across the x range.
        {
            const double ya = pan.fit_intercept + pan.fit_slope * ax.lo;
            const double yb = pan.fit_intercept + pan.fit_slope * ax.hi;
            s += "<line x1=\"" + fmt(x0) + "\" y1=\"" + fmt(ypx(ya)) + "\" x2=\"" + fmt(x1) +
                 "\" y2=\"" + fmt(ypx(yb)) + "\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n";
        }
        // Dashed bound line anchored at the first point.
        if (!pan.points.empty()) {
            const double bx = std::log10(pan.points.front().first);
            const double by = std::log10(pan.points.front().second);
            const double ya = by + pan.bound_slope * (ax.lo - bx);
            const double yb = by + pan.bound_slope * (ax.hi - bx);
            s += "<line x1=\"" + fmt(x0) + "\" y1=\"" + fmt(ypx(ya)) + "\" x2=\"" + fmt(x1) +
                 "\" y2=\"" + fmt(ypx(yb)) +
                 "\" stroke=\"#d62728\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"/>\n";
        }
        for (auto [x, y] : pan.points) {
            s += "<circle cx=\"" + fmt(ax.to_px(std::log10(x), x0, x1)) + "\" cy=\"" +
                 fmt(ypx(std::log10(y))) + "\" r=\"3.2\" fill=\"#111\"/>\n";
        }
    }
    s += "</svg>\n";
    return s;
}

}  // namespace sigest
