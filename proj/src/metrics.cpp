#include "uffsi/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace uffsi {

namespace {

constexpr int kSsimWindow = 8;
constexpr double kSsimC1 = 0.01 * 0.01;  // (0.01 * peak)^2, peak = 1
constexpr double kSsimC2 = 0.03 * 0.03;

// Summed-area table with a zero top row and left column.
std::vector<double> integral_image(const Image& img) {
    const int w = img.width, h = img.height;
    std::vector<double> s(static_cast<size_t>(w + 1) * (h + 1), 0.0);
    for (int y = 0; y < h; ++y) {
        double row = 0.0;
        for (int x = 0; x < w; ++x) {
            row += img.at(x, y);
            s[static_cast<size_t>(y + 1) * (w + 1) + (x + 1)] =
                s[static_cast<size_t>(y) * (w + 1) + (x + 1)] + row;
        }
    }
    return s;
}

double box_sum(const std::vector<double>& s, int stride, int x, int y, int n) {
    return s[static_cast<size_t>(y + n) * stride + (x + n)] -
           s[static_cast<size_t>(y) * stride + (x + n)] -
           s[static_cast<size_t>(y + n) * stride + x] + s[static_cast<size_t>(y) * stride + x];
}

void check_metric_inputs(const Image& img, const Image& ref, const RoiMask& mask) {
    if (!img.same_shape(ref)) throw std::invalid_argument("metric: image dimensions differ");
    if (mask.width != img.width || mask.height != img.height)
        throw std::invalid_argument("metric: mask dimensions differ");
}

}  // namespace

std::int64_t RoiMask::count() const {
    std::int64_t c = 0;
    for (auto v : mask) c += v != 0;
    return c;
}

RoiMask roi_from_fovea(const CellLayout& layout) {
    RoiMask roi;
    roi.width = layout.grid.x;
    roi.height = layout.grid.y;
    roi.mask.resize(layout.pixel_to_cell.size());
    for (size_t i = 0; i < layout.pixel_to_cell.size(); ++i)
        roi.mask[i] = layout.cell_kind[layout.pixel_to_cell[i]] == CellKind::Fovea ? 1 : 0;
    roi.derived_from = "fovea cells";
    return roi;
}

RoiMask roi_from_box(const PixelGrid& grid, int x0, int y0, int x1, int y1) {
    x0 = std::max(x0, 1);
    y0 = std::max(y0, 1);
    x1 = std::min(x1, grid.x);
    y1 = std::min(y1, grid.y);
    if (x0 > x1 || y0 > y1) throw std::invalid_argument("roi box: empty after clamping");
    RoiMask roi;
    roi.width = grid.x;
    roi.height = grid.y;
    roi.mask.assign(static_cast<size_t>(grid.pixel_count()), 0);
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
            roi.mask[static_cast<size_t>(y - 1) * grid.x + (x - 1)] = 1;
    roi.derived_from = "box";
    return roi;
}

RoiMask roi_full(const PixelGrid& grid) {
    RoiMask roi;
    roi.width = grid.x;
    roi.height = grid.y;
    roi.mask.assign(static_cast<size_t>(grid.pixel_count()), 1);
    roi.derived_from = "full frame";
    return roi;
}

double redundancy_reduction(std::int64_t m_pixels, std::int64_t n_cells) {
    if (m_pixels < 1) throw std::invalid_argument("redundancy: pixel count must be >= 1");
    if (n_cells > m_pixels) throw std::invalid_argument("redundancy: N exceeds M");
    return static_cast<double>(m_pixels - n_cells) / static_cast<double>(m_pixels);
}

double mse(const Image& img, const Image& ref, const RoiMask& mask) {
    check_metric_inputs(img, ref, mask);
    double sum = 0.0;
    std::int64_t count = 0;
    for (size_t i = 0; i < img.data.size(); ++i) {
        if (!mask.mask[i]) continue;
        const double d = img.data[i] - ref.data[i];
        sum += d * d;
        ++count;
    }
    if (count == 0) throw std::invalid_argument("metric: empty mask");
    return sum / static_cast<double>(count);
}

double psnr(const Image& img, const Image& ref, const RoiMask& mask) {
    const double err = mse(img, ref, mask);
    if (err == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / err);
}

double ssim(const Image& img, const Image& ref, const RoiMask& mask) {
    check_metric_inputs(img, ref, mask);
    const int w = img.width, h = img.height, n = kSsimWindow;
    if (w < n || h < n) throw std::invalid_argument("ssim: image smaller than one window");

    Image xy(w, h), xx(w, h), yy(w, h), mk(w, h);
    for (size_t i = 0; i < img.data.size(); ++i) {
        xy.data[i] = img.data[i] * ref.data[i];
        xx.data[i] = img.data[i] * img.data[i];
        yy.data[i] = ref.data[i] * ref.data[i];
        mk.data[i] = mask.mask[i] ? 1.0 : 0.0;
    }
    const auto sx = integral_image(img);
    const auto sy = integral_image(ref);
    const auto sxx = integral_image(xx);
    const auto syy = integral_image(yy);
    const auto sxy = integral_image(xy);
    const auto sm = integral_image(mk);
    const int stride = w + 1;
    const double inv = 1.0 / (n * n);

    double total = 0.0;
    std::int64_t windows = 0;
    for (int y = 0; y + n <= h; ++y) {
        for (int x = 0; x + n <= w; ++x) {
            if (box_sum(sm, stride, x, y, n) < n * n - 0.5) continue;  // window not fully masked
            const double mx = box_sum(sx, stride, x, y, n) * inv;
            const double my = box_sum(sy, stride, x, y, n) * inv;
            const double vx = box_sum(sxx, stride, x, y, n) * inv - mx * mx;
            const double vy = box_sum(syy, stride, x, y, n) * inv - my * my;
            const double cov = box_sum(sxy, stride, x, y, n) * inv - mx * my;
            const double num = (2.0 * mx * my + kSsimC1) * (2.0 * cov + kSsimC2);
            const double den = (mx * mx + my * my + kSsimC1) * (vx + vy + kSsimC2);
            total += num / den;
            ++windows;
        }
    }
    if (windows == 0) throw std::invalid_argument("ssim: mask smaller than one window");
    return total / static_cast<double>(windows);
}

Image smooth_nroi(const Image& img, const CellLayout& layout, double sigma) {
    if (img.width != layout.grid.x || img.height != layout.grid.y)
        throw std::invalid_argument("smooth_nroi: image dimensions do not match layout");
    if (!(sigma > 0.0)) throw std::invalid_argument("smooth_nroi: sigma must be > 0");

    const int radius = static_cast<int>(std::floor(3.0 * sigma));
    Image blurred = img;
    if (radius > 0) {
        std::vector<double> taps(static_cast<size_t>(radius) + 1);
        for (int t = 0; t <= radius; ++t)
            taps[static_cast<size_t>(t)] = std::exp(-0.5 * (t / sigma) * (t / sigma));

        const int w = img.width, h = img.height;
        Image tmp(w, h);
        // Horizontal pass, kernel renormalized over in-grid support.
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double acc = 0.0, wsum = 0.0;
                const int t0 = std::max(-radius, -x);
                const int t1 = std::min(radius, w - 1 - x);
                for (int t = t0; t <= t1; ++t) {
                    const double wt = taps[static_cast<size_t>(std::abs(t))];
                    acc += wt * img.at(x + t, y);
                    wsum += wt;
                }
                tmp.at(x, y) = acc / wsum;
            }
        }
        // Vertical pass.
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double acc = 0.0, wsum = 0.0;
                const int t0 = std::max(-radius, -y);
                const int t1 = std::min(radius, h - 1 - y);
                for (int t = t0; t <= t1; ++t) {
                    const double wt = taps[static_cast<size_t>(std::abs(t))];
                    acc += wt * tmp.at(x, y + t);
                    wsum += wt;
                }
                blurred.at(x, y) = acc / wsum;
            }
        }
    }

    Image out = img;  // fovea pixels pass through bit-identical
    for (size_t i = 0; i < img.data.size(); ++i)
        if (layout.cell_kind[layout.pixel_to_cell[i]] == CellKind::Periphery)
            out.data[i] = blurred.data[i];
    return out;
}

Scene make_test_chart(int x, int y, const ChartSpec& chart) {
    if (x < 1 || y < 1) throw std::invalid_argument("chart: grid must be >= 1x1");
    const int x0 = chart.roi_x0, y0 = chart.roi_y0, x1 = chart.roi_x1, y1 = chart.roi_y1;
    if (x0 < 1 || y0 < 1 || x1 > x || y1 > y || x0 > x1 || y0 > y1)
        throw std::invalid_argument("chart: ROI box outside grid");
    for (int p : chart.stripe_periods)
        if (p < 2) throw std::invalid_argument("chart: stripe periods must be >= 2");

    constexpr double kLo = 0.05;
    constexpr double kHi = 0.95;
    Scene scene;
    scene.image = Image(x, y, 0.5);
    scene.id = "synthetic-chart";

    const int bw = x1 - x0 + 1;
    const int bh = y1 - y0 + 1;
    const int bands = static_cast<int>(chart.stripe_periods.size()) + 1;
    const int band_h = std::max(1, bh / bands);

    // One band per stripe period: vertical line pairs on the left half,
    // horizontal on the right half.
    for (size_t bi = 0; bi < chart.stripe_periods.size(); ++bi) {
        const int period = chart.stripe_periods[bi];
        const int by0 = y0 + static_cast<int>(bi) * band_h;
        const int by1 = std::min(y1, by0 + band_h - 1);
        if (by0 > y1) break;
        for (int yy = by0; yy <= by1; ++yy) {
            for (int xx = x0; xx <= x1; ++xx) {
                const bool left = (xx - x0) < bw / 2;
                const int c = left ? (xx - x0) % period : (yy - by0) % period;
                scene.image.at(xx - 1, yy - 1) = (c < period / 2) ? kHi : kLo;
            }
        }
    }

    // Final band: block digits on a light background.
    static const std::uint16_t kDigitRows[10][5] = {
        {0b111, 0b101, 0b101, 0b101, 0b111}, {0b010, 0b110, 0b010, 0b010, 0b111},
        {0b111, 0b001, 0b111, 0b100, 0b111}, {0b111, 0b001, 0b111, 0b001, 0b111},
        {0b101, 0b101, 0b111, 0b001, 0b001}, {0b111, 0b100, 0b111, 0b001, 0b111},
        {0b111, 0b100, 0b111, 0b101, 0b111}, {0b111, 0b001, 0b010, 0b010, 0b010},
        {0b111, 0b101, 0b111, 0b101, 0b111}, {0b111, 0b101, 0b111, 0b001, 0b111}};
    const int dy0 = y0 + static_cast<int>(chart.stripe_periods.size()) * band_h;
    if (dy0 <= y1) {
        const int dband_h = y1 - dy0 + 1;
        const int scale = std::max(1, std::min(dband_h / 5, bw / (4 * 3)));
        const int glyph_w = 3 * scale, glyph_h = 5 * scale;
        const int fit = std::max(1, std::min(10, bw / (glyph_w + scale)));
        for (int yy = dy0; yy <= y1; ++yy)
            for (int xx = x0; xx <= x1; ++xx) scene.image.at(xx - 1, yy - 1) = kHi;
        for (int d = 0; d < fit; ++d) {
            const int gx = x0 + d * (glyph_w + scale);
            const int gy = dy0 + std::max(0, (dband_h - glyph_h) / 2);
            if (gx + glyph_w - 1 > x1) break;
            for (int r = 0; r < 5; ++r) {
                for (int c = 0; c < 3; ++c) {
                    if (!(kDigitRows[d][r] >> (2 - c) & 1)) continue;
                    for (int sy = 0; sy < scale; ++sy)
                        for (int sx = 0; sx < scale; ++sx) {
                            const int px = gx + c * scale + sx;
                            const int py = gy + r * scale + sy;
                            if (px <= x1 && py <= y1) scene.image.at(px - 1, py - 1) = kLo;
                        }
                }
            }
        }
    }
    return scene;
}

}  // namespace uffsi
