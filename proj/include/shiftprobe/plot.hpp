#pragma once

#include <string>
#include <vector>

namespace shiftprobe {

struct PlotSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

// Minimal static SVG line chart for the headline figures (accuracy vs shift,
// inferred-shift histograms, regression overlays).
void write_svg_line_chart(const std::string& path, const std::string& title,
                          const std::string& x_label, const std::string& y_label,
                          const std::vector<PlotSeries>& series, double y_min = 0.0,
                          double y_max = 1.0);

}  // namespace shiftprobe
