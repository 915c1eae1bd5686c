#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "uffsi/grid.hpp"

namespace uffsi {

enum class CellKind : std::uint8_t { Fovea = 0, Periphery = 1 };

// Circular structure: a fovea disc of radius r0 around a (possibly subpixel)
// center, surrounded by rings whose outer radii grow as r0 * epsilon^p, each
// ring split into q_sectors equal angular sectors.
struct CircularParams {
    double center_x = 0.0;  // 1-based pixel coordinates, may be subpixel
    double center_y = 0.0;
    double r0 = 1.0;        // fovea radius in pixels, >= 1
    double epsilon = 2.0;   // ring growth factor, > 1
    int q_sectors = 1;      // sectors per ring, >= 1
};

struct CircularMeta {
    int ring_count = 0;                     // P
    int q_sectors = 0;                      // Q
    std::int64_t fovea_cell_count = 0;      // N_c
    std::vector<double> ring_outer_radii;   // r_p = r0 * eps^p, p = 1..P
    std::vector<double> ring_center_radii;  // r_cp = r0 * (1 + eps)/2 * eps^(p-1)
    std::vector<double> log_coords;         // xi_p = log_eps(r_cp); consecutive values differ by 1
};

// Rectangular structure: unit-spaced cell centers inside the m0 x n0
// half-extent ROI, exponentially growing layer radii outside, per axis.
struct RectParams {
    int center_x = 0;  // integer pixel coordinate, inside grid
    int center_y = 0;
    int m0 = 1;        // ROI half-width (x), >= 1
    int n0 = 1;        // ROI half-height (y), >= 1
    double alpha1 = 2.0;  // x growth factor, > 1
    double alpha2 = 2.0;  // y growth factor, > 1
};

struct RotRectParams {
    RectParams rect;
    double theta = 0.0;  // radians in [0, pi/2), counterclockwise about the ROI center
};

struct RectMeta {
    std::vector<int> x_centers;  // ascending, deduplicated (working-frame coordinates)
    std::vector<int> y_centers;
    int m0 = 0;
    int n0 = 0;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double theta = 0.0;
};

struct Lattice1D {
    std::int64_t length = 0;
};

struct Lattice2D {
    int u_count = 0;  // U'
    int v_count = 0;  // V'
    // 1 marks a cell with zero pixels; such cells stay in the lattice so the
    // 2D transform grid remains rectangular, but carry no signal.
    std::vector<std::uint8_t> empty;
};

using Lattice = std::variant<Lattice1D, Lattice2D>;
using StructureMeta = std::variant<std::monostate, CircularMeta, RectMeta>;

// Partition of the M-pixel grid into cells plus the uniform transform lattice
// the cells occupy. pixel_to_cell is total: every pixel maps to exactly one
// lattice cell, and pixels never map to empty cells.
struct CellLayout {
    PixelGrid grid;
    std::int64_t cell_count = 0;               // non-empty cells (user-facing N)
    std::vector<std::uint32_t> pixel_to_cell;  // size M, raster order
    std::vector<CellKind> cell_kind;           // size lattice_size()
    std::vector<std::uint32_t> cell_sizes;     // pixels per lattice cell
    Lattice lattice;
    StructureMeta meta;

    std::int64_t lattice_size() const {
        if (const auto* l1 = std::get_if<Lattice1D>(&lattice)) return l1->length;
        const auto& l2 = std::get<Lattice2D>(lattice);
        return static_cast<std::int64_t>(l2.u_count) * l2.v_count;
    }
    bool is_2d() const { return std::holds_alternative<Lattice2D>(lattice); }
    bool cell_empty(std::int64_t n) const { return cell_sizes[static_cast<size_t>(n)] == 0; }
    std::int64_t fovea_cell_count() const;
};

// Per-cell normalization factors w(n) = 1 / |cell n|; empty cells carry 0.
struct WeightVector {
    std::vector<double> w;
};

CellLayout build_circular_layout(const CircularParams& params, const PixelGrid& grid);
CellLayout build_rect_layout(const RectParams& params, const PixelGrid& grid);
CellLayout build_rotrect_layout(const RotRectParams& params, const PixelGrid& grid);

// Every pixel its own fovea cell on a 2D X x Y lattice.
CellLayout build_identity_layout(const PixelGrid& grid);

WeightVector compute_weights(const CellLayout& layout);

// Arithmetic mean of each cell's pixels; empty cells get 0.
std::vector<double> cell_average(const Image& scene, const CellLayout& layout);

// Each pixel takes the value of its cell. Empty-cell entries are never read.
Image expand_to_pixels(const std::vector<double>& lattice_values, const CellLayout& layout);

// Functional equality: identical partition, kinds, sizes and lattice shape.
bool layouts_equal(const CellLayout& a, const CellLayout& b);

}  // namespace uffsi
