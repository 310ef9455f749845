#include "kamlab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "kamlab/common.hpp"

namespace kamlab::io {

void SvgPlot::add_line(std::vector<double> xs, std::vector<double> ys, std::string color) {
    series_.push_back({std::move(xs), std::move(ys), std::move(color), false, 0.0});
}

void SvgPlot::add_scatter(std::vector<double> xs, std::vector<double> ys, std::string color,
                          double radius) {
    series_.push_back({std::move(xs), std::move(ys), std::move(color), true, radius});
}

void SvgPlot::write(const std::filesystem::path& path) const {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot open SVG output " + path.string());

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series_)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double y = log_y_ ? std::log10(std::max(s.y[i], 1e-300)) : s.y[i];
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    if (!(ymax > ymin)) ymax = ymin + 1.0;

    const double ml = 50, mr = 15, mt = 15, mb = 35;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width_ - ml - mr); };
    auto py = [&](double yv) {
        const double y = log_y_ ? std::log10(std::max(yv, 1e-300)) : yv;
        return height_ - mb - (y - ymin) / (ymax - ymin) * (height_ - mt - mb);
    };

    f << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width_ << "' height='" << height_
      << "'>\n<rect x='" << ml << "' y='" << mt << "' width='" << width_ - ml - mr << "' height='"
      << height_ - mt - mb << "' fill='none' stroke='#444'/>\n";
    for (const auto& s : series_) {
        if (s.scatter) {
            for (std::size_t i = 0; i < s.x.size(); ++i)
                f << "<circle cx='" << px(s.x[i]) << "' cy='" << py(s.y[i]) << "' r='" << s.radius
                  << "' fill='" << s.color << "'/>\n";
        } else {
            f << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.2' points='";
            for (std::size_t i = 0; i < s.x.size(); ++i)
                f << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
            f << "'/>\n";
        }
    }
    f << "<text x='" << ml << "' y='" << height_ - 10 << "' font-size='11'>" << xmin << "</text>\n";
    f << "<text x='" << width_ - mr - 40 << "' y='" << height_ - 10 << "' font-size='11'>" << xmax
      << "</text>\n</svg>\n";
}

}  // namespace kamlab::io
