#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace kamlab::io {

/// Minimal SVG line/scatter writer; CSV remains the data contract, this is
/// plotting sugar for quick inspection.
class SvgPlot {
  public:
    SvgPlot(int width = 720, int height = 480) : width_(width), height_(height) {}

    void add_line(std::vector<double> xs, std::vector<double> ys, std::string color = "#1f6fb2");
    void add_scatter(std::vector<double> xs, std::vector<double> ys, std::string color = "#b23a1f",
                     double radius = 1.2);
    void set_log_y(bool on) { log_y_ = on; }

    void write(const std::filesystem::path& path) const;

  private:
    struct Series {
        std::vector<double> x, y;
        std::string color;
        bool scatter = false;
        double radius = 0.0;
    };
    int width_, height_;
    bool log_y_ = false;
    std::vector<Series> series_;
};

}  // namespace kamlab::io
