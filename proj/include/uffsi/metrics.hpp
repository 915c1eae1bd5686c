#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uffsi/layout.hpp"
#include "uffsi/sensing.hpp"

namespace uffsi {

struct RoiMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> mask;
    std::string derived_from;

    bool at(int x, int y) const { return mask[static_cast<size_t>(y) * width + x] != 0; }
    std::int64_t count() const;
};

RoiMask roi_from_fovea(const CellLayout& layout);
// 1-based inclusive box corners, clamped to the grid.
RoiMask roi_from_box(const PixelGrid& grid, int x0, int y0, int x1, int y1);
RoiMask roi_full(const PixelGrid& grid);

// (M - N) / M.
double redundancy_reduction(std::int64_t m_pixels, std::int64_t n_cells);

double mse(const Image& img, const Image& ref, const RoiMask& mask);

// 10 log10(peak^2 / MSE) over masked pixels with peak = 1; returns +infinity
// when the images agree on the mask.
double psnr(const Image& img, const Image& ref, const RoiMask& mask);

// Mean SSIM over all 8x8 windows (stride 1) fully inside the mask, uniform
// window, C1 = (0.01 peak)^2, C2 = (0.03 peak)^2, peak = 1.
double ssim(const Image& img, const Image& ref, const RoiMask& mask);

// Gaussian blur (truncated at 3 sigma, kernel renormalized over in-grid
// support) applied to periphery pixels only; fovea pixels pass through
// bit-identical.
Image smooth_nroi(const Image& img, const CellLayout& layout, double sigma);

// Deterministic synthetic chart: line pairs at the requested stripe periods
// plus block digits inside the ROI box, mid-gray elsewhere.
struct ChartSpec {
    int roi_x0 = 1, roi_y0 = 1, roi_x1 = 1, roi_y1 = 1;  // 1-based inclusive
    std::vector<int> stripe_periods = {2, 4, 8};
};
Scene make_test_chart(int x, int y, const ChartSpec& chart);

}  // namespace uffsi
