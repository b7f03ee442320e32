#include "shiftprobe/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "shiftprobe/errors.hpp"

namespace shiftprobe {

namespace {

const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                         "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

}  // namespace

void write_svg_line_chart(const std::string& path, const std::string& title,
                          const std::string& x_label, const std::string& y_label,
                          const std::vector<PlotSeries>& series, double y_min, double y_max) {
    const double width = 640, height = 420;
    const double ml = 60, mr = 130, mt = 40, mb = 50;
    const double pw = width - ml - mr, ph = height - mt - mb;

    double x_min = 1e300, x_max = -1e300;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            x_min = std::min(x_min, x);
            x_max = std::max(x_max, x);
        }
    }
    if (x_min >= x_max) {
        x_min -= 1;
        x_max += 1;
    }
    if (y_min >= y_max) y_max = y_min + 1;

    auto px = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * pw; };
    auto py = [&](double y) { return mt + ph - (y - y_min) / (y_max - y_min) * ph; };

    std::ofstream f(path, std::ios::trunc);
    if (!f) throw Error("cannot write " + path);
    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    f << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    f << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"15\">"
      << title << "</text>\n";

    // Axes and gridlines.
    f << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\""
      << mt + ph << "\" stroke=\"black\"/>\n";
    f << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph
      << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        double y = y_min + (y_max - y_min) * i / 5.0;
        f << "<line x1=\"" << ml << "\" y1=\"" << py(y) << "\" x2=\"" << ml + pw << "\" y2=\""
          << py(y) << "\" stroke=\"#dddddd\"/>\n";
        f << "<text x=\"" << ml - 8 << "\" y=\"" << py(y) + 4
          << "\" text-anchor=\"end\">" << y << "</text>\n";
    }
    int x_ticks = std::min(12, static_cast<int>(std::lround(x_max - x_min)));
    x_ticks = std::max(x_ticks, 1);
    for (int i = 0; i <= x_ticks; ++i) {
        double x = x_min + (x_max - x_min) * i / x_ticks;
        f << "<text x=\"" << px(x) << "\" y=\"" << mt + ph + 16
          << "\" text-anchor=\"middle\">" << std::lround(x) << "</text>\n";
    }
    f << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
    f << "<text x=\"16\" y=\"" << mt + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << mt + ph / 2 << ")\">" << y_label << "</text>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = kColors[i % 8];
        f << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (const auto& [x, y] : series[i].points) f << px(x) << ',' << py(y) << ' ';
        f << "\"/>\n";
        double ly = mt + 14 + 16 * static_cast<double>(i);
        f << "<line x1=\"" << ml + pw + 10 << "\" y1=\"" << ly << "\" x2=\"" << ml + pw + 30
          << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        f << "<text x=\"" << ml + pw + 34 << "\" y=\"" << ly + 4 << "\">" << series[i].name
          << "</text>\n";
    }
    f << "</svg>\n";
}

}  // namespace shiftprobe
