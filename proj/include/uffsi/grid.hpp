#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace uffsi {

// Pixel centers sit at integer coordinates (x, y) in [1..X] x [1..Y]; the
// image y axis points down. Raster pixel index: m = (y - 1) * X + (x - 1).
struct PixelGrid {
    int x = 0;
    int y = 0;

    std::int64_t pixel_count() const { return static_cast<std::int64_t>(x) * y; }
    bool contains(double px, double py) const {
        return px >= 1.0 && px <= static_cast<double>(x) && py >= 1.0 && py <= static_cast<double>(y);
    }
};

// Row-major f64 image; indices here are 0-based.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    Image() = default;
    Image(int w, int h, double fill = 0.0)
        : width(w), height(h), data(static_cast<size_t>(w) * static_cast<size_t>(h), fill) {}

    double& at(int xx, int yy) { return data[static_cast<size_t>(yy) * width + xx]; }
    double at(int xx, int yy) const { return data[static_cast<size_t>(yy) * width + xx]; }
    std::int64_t pixel_count() const { return static_cast<std::int64_t>(width) * height; }
    bool same_shape(const Image& o) const { return width == o.width && height == o.height; }
};

struct io_error : std::runtime_error {
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace uffsi
