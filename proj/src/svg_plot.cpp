// SPDX-License-Identifier: Apache-2.0
#include "bdft/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace bdft {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Panel {
    double x0, y0, x1, y1;  // plot area in SVG coordinates (y down)
    double lo_x, hi_x;      // data range, x already log10
    double lo_y, hi_y;

    double px(double x) const { return x0 + (x - lo_x) / (hi_x - lo_x) * (x1 - x0); }
    double py(double y) const { return y1 - (y - lo_y) / (hi_y - lo_y) * (y1 - y0); }
};

void draw_frame(std::ostringstream& svg, const Panel& p, const std::string& ylabel) {
    svg << "<rect x='" << num(p.x0) << "' y='" << num(p.y0) << "' width='" << num(p.x1 - p.x0)
        << "' height='" << num(p.y1 - p.y0) << "' fill='none' stroke='#444'/>\n";
    svg << "<text x='14' y='" << num((p.y0 + p.y1) / 2.0)
        << "' font-size='12' text-anchor='middle' transform='rotate(-90 14 "
        << num((p.y0 + p.y1) / 2.0) << ")'>" << ylabel << "</text>\n";
}

void draw_log_x_ticks(std::ostringstream& svg, const Panel& p, bool labels) {
    for (int d = static_cast<int>(std::ceil(p.lo_x - 1e-9));
         d <= static_cast<int>(std::floor(p.hi_x + 1e-9)); ++d) {
        const double x = p.px(d);
        svg << "<line x1='" << num(x) << "' y1='" << num(p.y0) << "' x2='" << num(x) << "' y2='"
            << num(p.y1) << "' stroke='#ddd'/>\n";
        if (labels)
            svg << "<text x='" << num(x) << "' y='" << num(p.y1 + 16)
                << "' font-size='11' text-anchor='middle'>1e" << d << "</text>\n";
    }
}

void draw_y_ticks(std::ostringstream& svg, const Panel& p, double step) {
    const double first = std::ceil(p.lo_y / step) * step;
    for (double v = first; v <= p.hi_y + 1e-9; v += step) {
        const double y = p.py(v);
        svg << "<line x1='" << num(p.x0) << "' y1='" << num(y) << "' x2='" << num(p.x1)
            << "' y2='" << num(y) << "' stroke='#ddd'/>\n";
        svg << "<text x='" << num(p.x0 - 6) << "' y='" << num(y + 4)
            << "' font-size='11' text-anchor='end'>" << num(v) << "</text>\n";
    }
}

}  // namespace

std::string bode_svg(const std::vector<BodeSeries>& series, const std::string& title) {
    // collect ranges (positive frequencies and magnitudes only; log axes)
    double lo_w = 0.0, hi_w = 0.0, lo_db = 0.0, hi_db = 0.0;
    bool any = false;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.omega.size(); ++i) {
            const double w = s.omega[i];
            const double mag = std::abs(s.value[i]);
            if (!(w > 0.0) || !(mag > 0.0)) continue;
            const double lw = std::log10(w);
            const double db = 20.0 * std::log10(mag);
            if (!any) {
                lo_w = hi_w = lw;
                lo_db = hi_db = db;
                any = true;
            } else {
                lo_w = std::min(lo_w, lw);
                hi_w = std::max(hi_w, lw);
                lo_db = std::min(lo_db, db);
                hi_db = std::max(hi_db, db);
            }
        }
    }
    if (!any) {
        lo_w = -1.0, hi_w = 2.0, lo_db = -40.0, hi_db = 20.0;
    }
    if (hi_w - lo_w < 0.5) hi_w = lo_w + 0.5;
    lo_db -= 5.0;
    hi_db += 5.0;

    Panel mag{70, 40, 690, 260, lo_w, hi_w, lo_db, hi_db};
    Panel phase{70, 300, 690, 510, lo_w, hi_w, -200.0, 200.0};

    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='720' height='560' "
           "font-family='sans-serif'>\n";
    svg << "<text x='360' y='22' font-size='14' text-anchor='middle'>" << title << "</text>\n";

    draw_frame(svg, mag, "magnitude [dB mm per m/s^2]");
    draw_log_x_ticks(svg, mag, false);
    draw_y_ticks(svg, mag, 20.0);
    draw_frame(svg, phase, "phase [deg]");
    draw_log_x_ticks(svg, phase, true);
    draw_y_ticks(svg, phase, 90.0);
    svg << "<text x='380' y='545' font-size='12' text-anchor='middle'>frequency [rad/s]</text>\n";

    double legend_y = 52.0;
    for (const auto& s : series) {
        auto emit = [&](const Panel& p, auto value_of) {
            if (s.markers) {
                for (std::size_t i = 0; i < s.omega.size(); ++i) {
                    if (!(s.omega[i] > 0.0)) continue;
                    const double v = value_of(i);
                    if (!std::isfinite(v)) continue;
                    svg << "<circle cx='" << num(p.px(std::log10(s.omega[i]))) << "' cy='"
                        << num(p.py(std::clamp(v, p.lo_y, p.hi_y))) << "' r='3' fill='"
                        << s.color << "'/>\n";
                }
            } else {
                svg << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.5' points='";
                for (std::size_t i = 0; i < s.omega.size(); ++i) {
                    if (!(s.omega[i] > 0.0)) continue;
                    const double v = value_of(i);
                    if (!std::isfinite(v)) continue;
                    svg << num(p.px(std::log10(s.omega[i]))) << ','
                        << num(p.py(std::clamp(v, p.lo_y, p.hi_y))) << ' ';
                }
                svg << "'/>\n";
            }
        };
        emit(mag, [&](std::size_t i) { return 20.0 * std::log10(std::abs(s.value[i])); });
        emit(phase, [&](std::size_t i) { return 180.0 / kPi * std::arg(s.value[i]); });

        svg << "<circle cx='560' cy='" << num(legend_y - 4) << "' r='4' fill='" << s.color
            << "'/>\n";
        svg << "<text x='570' y='" << num(legend_y) << "' font-size='11'>" << s.label
            << "</text>\n";
        legend_y += 15.0;
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace bdft
