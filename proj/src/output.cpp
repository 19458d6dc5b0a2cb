#include "ahvx/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "ahvx/util.hpp"

namespace ahvx {

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream os(path);
    if (!os) throw numeric_error("cannot open " + path);
    for (std::size_t c = 0; c < columns.size(); ++c)
        os << columns[c] << (c + 1 < columns.size() ? ',' : '\n');
    os << std::setprecision(12);
    for (const auto& r : rows) {
        for (std::size_t c = 0; c < r.size(); ++c) os << r[c] << (c + 1 < r.size() ? ',' : '\n');
    }
}

std::string fnv1a_hex(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t hsh = 1469598103934665603ULL;
    for (std::size_t i = 0; i < n; ++i) {
        hsh ^= p[i];
        hsh *= 1099511628211ULL;
    }
    std::ostringstream ss;
    ss << std::hex << std::setw(16) << std::setfill('0') << hsh;
    return ss.str();
}

namespace {
const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
}

void svg_plot(const std::string& path, const std::string& title, const std::string& xlabel,
              const std::string& ylabel, const std::vector<PlotSeries>& series, bool logx,
              bool logy) {
    const double W = 760, H = 520, ml = 80, mr = 20, mt = 46, mb = 60;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    auto tx = [&](double x) { return logx ? std::log10(x) : x; };
    auto ty = [&](double y) { return logy ? std::log10(y) : y; };
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if ((logx && s.x[i] <= 0) || (logy && s.y[i] <= 0)) continue;
            xmin = std::min(xmin, tx(s.x[i]));
            xmax = std::max(xmax, tx(s.x[i]));
            ymin = std::min(ymin, ty(s.y[i]));
            ymax = std::max(ymax, ty(s.y[i]));
        }
    if (xmin > xmax) { xmin = 0; xmax = 1; }
    if (ymin > ymax) { ymin = 0; ymax = 1; }
    if (xmax - xmin < 1e-300) { xmax = xmin + 1; }
    if (ymax - ymin < 1e-300) { ymax = ymin + (std::abs(ymin) > 0 ? std::abs(ymin) * 0.1 : 1.0); }
    double padx = 0.04 * (xmax - xmin), pady = 0.06 * (ymax - ymin);
    xmin -= padx; xmax += padx; ymin -= pady; ymax += pady;
    auto px = [&](double x) { return ml + (tx(x) - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto py = [&](double y) { return H - mb - (ty(y) - ymin) / (ymax - ymin) * (H - mt - mb); };

    std::ofstream os(path);
    if (!os) throw numeric_error("cannot open " + path);
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    os << "<rect width='100%' height='100%' fill='white'/>\n";
    os << "<text x='" << W / 2 << "' y='24' font-size='16' text-anchor='middle'>" << title
       << "</text>\n";
    os << "<text x='" << W / 2 << "' y='" << H - 14 << "' font-size='13' text-anchor='middle'>"
       << xlabel << "</text>\n";
    os << "<text x='18' y='" << H / 2 << "' font-size='13' text-anchor='middle' transform='rotate(-90 18 "
       << H / 2 << ")'>" << ylabel << "</text>\n";
    // axes box and ticks
    os << "<rect x='" << ml << "' y='" << mt << "' width='" << W - ml - mr << "' height='"
       << H - mt - mb << "' fill='none' stroke='black'/>\n";
    os << std::setprecision(4);
    for (int k = 0; k <= 5; ++k) {
        double xv = xmin + (xmax - xmin) * k / 5, yv = ymin + (ymax - ymin) * k / 5;
        double xpix = ml + (W - ml - mr) * k / 5.0, ypix = H - mb - (H - mt - mb) * k / 5.0;
        os << "<line x1='" << xpix << "' y1='" << H - mb << "' x2='" << xpix << "' y2='"
           << H - mb + 5 << "' stroke='black'/>\n";
        os << "<text x='" << xpix << "' y='" << H - mb + 20
           << "' font-size='11' text-anchor='middle'>" << (logx ? std::pow(10, xv) : xv)
           << "</text>\n";
        os << "<line x1='" << ml - 5 << "' y1='" << ypix << "' x2='" << ml << "' y2='" << ypix
           << "' stroke='black'/>\n";
        os << "<text x='" << ml - 8 << "' y='" << ypix + 4
           << "' font-size='11' text-anchor='end'>" << (logy ? std::pow(10, yv) : yv)
           << "</text>\n";
    }
    int ci = 0;
    for (const auto& s : series) {
        std::ostringstream pts;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if ((logx && s.x[i] <= 0) || (logy && s.y[i] <= 0)) continue;
            pts << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
        }
        const char* col = kPalette[ci % 6];
        os << "<polyline points='" << pts.str() << "' fill='none' stroke='" << col
           << "' stroke-width='1.6'/>\n";
        os << "<text x='" << W - mr - 8 << "' y='" << mt + 18 + 16 * ci
           << "' font-size='12' text-anchor='end' fill='" << col << "'>" << s.label
           << "</text>\n";
        ++ci;
    }
    os << "</svg>\n";
}

} // namespace ahvx
