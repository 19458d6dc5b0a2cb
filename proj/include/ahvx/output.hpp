#ifndef AHVX_OUTPUT_HPP
#define AHVX_OUTPUT_HPP

#include <string>
#include <vector>

namespace ahvx {

struct PlotSeries {
    std::string label;
    std::vector<double> x, y;
};

// Minimal SVG line plot (log axes optional; zero/negative values are dropped
// on log axes).
void svg_plot(const std::string& path, const std::string& title, const std::string& xlabel,
              const std::string& ylabel, const std::vector<PlotSeries>& series,
              bool logx = false, bool logy = false);

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

std::string fnv1a_hex(const void* data, std::size_t n);

} // namespace ahvx

#endif
