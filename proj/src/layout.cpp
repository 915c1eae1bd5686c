#include "uffsi/layout.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace uffsi {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Guard against growth factors so close to 1 that the layer loop degenerates.
constexpr int kMaxLayers = 10'000'000;

void validate_grid(const PixelGrid& grid) {
    if (grid.x < 1 || grid.y < 1) throw std::invalid_argument("grid: X and Y must be >= 1");
}

// Farthest distance from (cx, cy) to the four boundary vertices (pixel centers).
double max_corner_distance(const PixelGrid& grid, double cx, double cy) {
    double d = 0.0;
    const double xs[2] = {1.0, static_cast<double>(grid.x)};
    const double ys[2] = {1.0, static_cast<double>(grid.y)};
    for (double x : xs)
        for (double y : ys) d = std::max(d, std::hypot(x - cx, y - cy));
    return d;
}

// Layer radius along one axis: linear (unit steps) inside the ROI half-extent
// h0, exponential h0 * alpha^(t - h0) outside.
double layer_radius(int t, int h0, double alpha) {
    if (t <= h0) return static_cast<double>(t);
    return h0 * std::pow(alpha, t - h0);
}

// Cell-center coordinates along one axis: the center itself plus +-round(R(t))
// for t = 1..T, clamped to [lo, hi], where T is the smallest layer count whose
// radius covers the farthest extent from the center. Duplicates collapse to
// the first occurrence, leaving a sorted list of distinct coordinates.
std::vector<int> axis_centers(int c, int h0, double alpha, int lo, int hi) {
    const long ext_left = c - lo;
    const long ext_right = hi - c;
    const long extent = std::max(ext_left, ext_right);

    std::vector<int> left;   // descending coordinates, deduplicated
    std::vector<int> right;  // ascending coordinates, deduplicated
    for (int t = 1; extent > 0; ++t) {
        if (t > kMaxLayers)
            throw std::invalid_argument("rect: growth factor too close to 1 for this grid");
        const long r = std::lround(layer_radius(t, h0, alpha));
        const int xl = static_cast<int>(std::max<long>(lo, c - r));
        const int xr = static_cast<int>(std::min<long>(hi, c + r));
        if (left.empty() || xl != left.back()) left.push_back(xl);
        if (right.empty() || xr != right.back()) right.push_back(xr);
        if (r >= extent) break;
    }

    std::vector<int> xs;
    xs.reserve(left.size() + right.size() + 1);
    xs.insert(xs.end(), left.rbegin(), left.rend());
    xs.push_back(c);
    xs.insert(xs.end(), right.begin(), right.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

// Index of the nearest center; equidistant queries go to the lower index.
int nearest_index(const std::vector<int>& xs, double q) {
    auto it = std::lower_bound(xs.begin(), xs.end(), q);
    if (it == xs.begin()) return 0;
    if (it == xs.end()) return static_cast<int>(xs.size()) - 1;
    const int hi = static_cast<int>(it - xs.begin());
    const int lo = hi - 1;
    return (q - xs[lo] <= xs[hi] - q) ? lo : hi;
}

void validate_rect_params(const RectParams& p, const PixelGrid& grid) {
    if (p.m0 < 1 || p.n0 < 1) throw std::invalid_argument("rect: m0 and n0 must be >= 1");
    if (!(p.alpha1 > 1.0) || !(p.alpha2 > 1.0))
        throw std::invalid_argument("rect: growth factors must be > 1");
    if (p.center_x < 1 || p.center_x > grid.x || p.center_y < 1 || p.center_y > grid.y)
        throw std::invalid_argument("rect: center outside grid");
}

// Shared core of the rectangular and rotated-rectangular builders. The
// transform maps pixel coordinates into the working frame; for the plain
// rectangular structure it is the identity.
template <typename XfM>
CellLayout build_rect_like(const RectParams& p, const PixelGrid& grid, double theta, XfM&& to_frame,
                           int lo_x, int hi_x, int lo_y, int hi_y) {
    std::vector<int> xs = axis_centers(p.center_x, p.m0, p.alpha1, lo_x, hi_x);
    std::vector<int> ys = axis_centers(p.center_y, p.n0, p.alpha2, lo_y, hi_y);
    const int uc = static_cast<int>(xs.size());
    const int vc = static_cast<int>(ys.size());
    const std::int64_t cells = static_cast<std::int64_t>(uc) * vc;
    const std::int64_t m = grid.pixel_count();

    CellLayout layout;
    layout.grid = grid;
    layout.pixel_to_cell.resize(static_cast<size_t>(m));
    layout.cell_sizes.assign(static_cast<size_t>(cells), 0);
    std::vector<std::uint8_t> in_box(static_cast<size_t>(cells), 1);

    std::int64_t idx = 0;
    for (int y = 1; y <= grid.y; ++y) {
        for (int x = 1; x <= grid.x; ++x, ++idx) {
            const auto [fx, fy] = to_frame(x, y);
            const int u = nearest_index(xs, fx);
            const int v = nearest_index(ys, fy);
            const std::int64_t n = static_cast<std::int64_t>(v) * uc + u;
            layout.pixel_to_cell[static_cast<size_t>(idx)] = static_cast<std::uint32_t>(n);
            layout.cell_sizes[static_cast<size_t>(n)]++;
            if (std::abs(fx - p.center_x) > p.m0 || std::abs(fy - p.center_y) > p.n0)
                in_box[static_cast<size_t>(n)] = 0;
        }
    }

    Lattice2D lat;
    lat.u_count = uc;
    lat.v_count = vc;
    lat.empty.assign(static_cast<size_t>(cells), 0);
    layout.cell_kind.assign(static_cast<size_t>(cells), CellKind::Periphery);
    std::int64_t nonempty = 0;
    for (std::int64_t n = 0; n < cells; ++n) {
        const auto sz = layout.cell_sizes[static_cast<size_t>(n)];
        if (sz == 0) {
            lat.empty[static_cast<size_t>(n)] = 1;
        } else {
            ++nonempty;
            if (sz == 1 && in_box[static_cast<size_t>(n)])
                layout.cell_kind[static_cast<size_t>(n)] = CellKind::Fovea;
        }
    }
    layout.cell_count = nonempty;
    layout.lattice = std::move(lat);

    RectMeta meta;
    meta.x_centers = std::move(xs);
    meta.y_centers = std::move(ys);
    meta.m0 = p.m0;
    meta.n0 = p.n0;
    meta.alpha1 = p.alpha1;
    meta.alpha2 = p.alpha2;
    meta.theta = theta;
    layout.meta = std::move(meta);
    return layout;
}

}  // namespace

std::int64_t CellLayout::fovea_cell_count() const {
    std::int64_t n = 0;
    for (CellKind k : cell_kind)
        if (k == CellKind::Fovea) ++n;
    return n;
}

CellLayout build_circular_layout(const CircularParams& p, const PixelGrid& grid) {
    validate_grid(grid);
    if (!(p.r0 >= 1.0)) throw std::invalid_argument("circular: r0 must be >= 1");
    if (!(p.epsilon > 1.0)) throw std::invalid_argument("circular: epsilon must be > 1");
    if (p.q_sectors < 1) throw std::invalid_argument("circular: Q must be >= 1");
    if (!grid.contains(p.center_x, p.center_y))
        throw std::invalid_argument("circular: center outside grid");

    const std::int64_t m = grid.pixel_count();
    const double maxd = max_corner_distance(grid, p.center_x, p.center_y);
    const int q_count = p.q_sectors;

    // Ring outer radii r_p = r0 * eps^p until the whole FOV is covered.
    std::vector<double> ring_outer;
    if (p.r0 < maxd) {
        for (int ring = 1;; ++ring) {
            if (ring > kMaxLayers)
                throw std::invalid_argument("circular: epsilon too close to 1 for this grid");
            const double rp = p.r0 * std::pow(p.epsilon, ring);
            ring_outer.push_back(rp);
            if (rp >= maxd) break;
        }
    }
    const int ring_count = static_cast<int>(ring_outer.size());

    // Pass 1: classify pixels. Fovea pixels (r <= r0) become singleton cells in
    // raster order; the rest land in ring p (half-open annulus (r_{p-1}, r_p])
    // and sector floor(omega Q / 2 pi), omega in [0, 2 pi) from the +x axis.
    std::vector<std::int32_t> provisional(static_cast<size_t>(m));
    std::vector<std::uint32_t> ring_sector_sizes(static_cast<size_t>(ring_count) * q_count, 0);
    std::int64_t fovea_pixels = 0;
    std::int64_t idx = 0;
    for (int y = 1; y <= grid.y; ++y) {
        for (int x = 1; x <= grid.x; ++x, ++idx) {
            const double dx = x - p.center_x;
            const double dy = y - p.center_y;
            const double r = std::hypot(dx, dy);
            if (r <= p.r0) {
                provisional[static_cast<size_t>(idx)] = -1;
                ++fovea_pixels;
                continue;
            }
            const auto it = std::lower_bound(ring_outer.begin(), ring_outer.end(), r);
            const int ring = static_cast<int>(it - ring_outer.begin());
            double omega = std::atan2(dy, dx);
            if (omega < 0.0) omega += kTwoPi;
            int q = static_cast<int>(std::floor(omega * q_count / kTwoPi));
            q = std::clamp(q, 0, q_count - 1);
            const std::int32_t cell = static_cast<std::int32_t>(ring) * q_count + q;
            provisional[static_cast<size_t>(idx)] = cell;
            ring_sector_sizes[static_cast<size_t>(cell)]++;
        }
    }

    // Ring/sector cells without pixels in the FOV are deleted; survivors keep
    // ring-major, sector-minor order after the fovea block.
    std::vector<std::int32_t> compact(ring_sector_sizes.size(), -1);
    std::int64_t next = fovea_pixels;
    for (size_t i = 0; i < ring_sector_sizes.size(); ++i)
        if (ring_sector_sizes[i] > 0) compact[i] = static_cast<std::int32_t>(next++);
    const std::int64_t cells = next;

    CellLayout layout;
    layout.grid = grid;
    layout.cell_count = cells;
    layout.pixel_to_cell.resize(static_cast<size_t>(m));
    layout.cell_sizes.assign(static_cast<size_t>(cells), 0);
    layout.cell_kind.assign(static_cast<size_t>(cells), CellKind::Periphery);
    std::fill(layout.cell_kind.begin(), layout.cell_kind.begin() + fovea_pixels, CellKind::Fovea);

    std::int64_t fovea_seen = 0;
    for (std::int64_t i = 0; i < m; ++i) {
        const std::int32_t prov = provisional[static_cast<size_t>(i)];
        const std::int64_t cell = (prov < 0) ? fovea_seen++ : compact[static_cast<size_t>(prov)];
        layout.pixel_to_cell[static_cast<size_t>(i)] = static_cast<std::uint32_t>(cell);
        layout.cell_sizes[static_cast<size_t>(cell)]++;
    }

    layout.lattice = Lattice1D{cells};

    CircularMeta meta;
    meta.ring_count = ring_count;
    meta.q_sectors = q_count;
    meta.fovea_cell_count = fovea_pixels;
    meta.ring_outer_radii = std::move(ring_outer);
    const double log_eps = std::log(p.epsilon);
    for (int ring = 1; ring <= ring_count; ++ring) {
        const double rc = p.r0 * 0.5 * (1.0 + p.epsilon) * std::pow(p.epsilon, ring - 1);
        meta.ring_center_radii.push_back(rc);
        meta.log_coords.push_back(std::log(rc) / log_eps);
    }
    layout.meta = std::move(meta);
    return layout;
}

CellLayout build_rect_layout(const RectParams& p, const PixelGrid& grid) {
    validate_grid(grid);
    validate_rect_params(p, grid);
    auto identity_frame = [](int x, int y) { return std::pair<double, double>(x, y); };
    return build_rect_like(p, grid, 0.0, identity_frame, 1, grid.x, 1, grid.y);
}

CellLayout build_rotrect_layout(const RotRectParams& rp, const PixelGrid& grid) {
    validate_grid(grid);
    validate_rect_params(rp.rect, grid);
    if (!(rp.theta >= 0.0) || !(rp.theta < std::numbers::pi / 2.0))
        throw std::invalid_argument("rotrect: theta must lie in [0, pi/2)");

    const RectParams& p = rp.rect;
    const double ct = std::cos(rp.theta);
    const double st = std::sin(rp.theta);
    auto to_frame = [&](int x, int y) {
        const double dx = x - p.center_x;
        const double dy = y - p.center_y;
        return std::pair<double, double>(ct * dx - st * dy + p.center_x,
                                         st * dx + ct * dy + p.center_y);
    };

    // The working-frame extents must cover the rotated bounding box of the FOV.
    double fx_min = p.center_x, fx_max = p.center_x;
    double fy_min = p.center_y, fy_max = p.center_y;
    const int cs[2] = {1, grid.x};
    const int rs[2] = {1, grid.y};
    for (int x : cs) {
        for (int y : rs) {
            const auto [fx, fy] = to_frame(x, y);
            fx_min = std::min(fx_min, fx);
            fx_max = std::max(fx_max, fx);
            fy_min = std::min(fy_min, fy);
            fy_max = std::max(fy_max, fy);
        }
    }
    const int lo_x = p.center_x - static_cast<int>(std::ceil(p.center_x - fx_min));
    const int hi_x = p.center_x + static_cast<int>(std::ceil(fx_max - p.center_x));
    const int lo_y = p.center_y - static_cast<int>(std::ceil(p.center_y - fy_min));
    const int hi_y = p.center_y + static_cast<int>(std::ceil(fy_max - p.center_y));

    return build_rect_like(p, grid, rp.theta, to_frame, lo_x, hi_x, lo_y, hi_y);
}

CellLayout build_identity_layout(const PixelGrid& grid) {
    validate_grid(grid);
    const std::int64_t m = grid.pixel_count();
    CellLayout layout;
    layout.grid = grid;
    layout.cell_count = m;
    layout.pixel_to_cell.resize(static_cast<size_t>(m));
    for (std::int64_t i = 0; i < m; ++i)
        layout.pixel_to_cell[static_cast<size_t>(i)] = static_cast<std::uint32_t>(i);
    layout.cell_kind.assign(static_cast<size_t>(m), CellKind::Fovea);
    layout.cell_sizes.assign(static_cast<size_t>(m), 1);
    layout.lattice = Lattice2D{grid.x, grid.y, std::vector<std::uint8_t>(static_cast<size_t>(m), 0)};
    layout.meta = std::monostate{};
    return layout;
}

WeightVector compute_weights(const CellLayout& layout) {
    WeightVector weights;
    weights.w.resize(layout.cell_sizes.size());
    for (size_t n = 0; n < layout.cell_sizes.size(); ++n)
        weights.w[n] = layout.cell_sizes[n] ? 1.0 / layout.cell_sizes[n] : 0.0;
    return weights;
}

std::vector<double> cell_average(const Image& scene, const CellLayout& layout) {
    if (scene.width != layout.grid.x || scene.height != layout.grid.y)
        throw std::invalid_argument("cell_average: scene dimensions do not match layout grid");
    std::vector<double> sums(layout.cell_sizes.size(), 0.0);
    const std::int64_t m = layout.grid.pixel_count();
    for (std::int64_t i = 0; i < m; ++i)
        sums[layout.pixel_to_cell[static_cast<size_t>(i)]] += scene.data[static_cast<size_t>(i)];
    for (size_t n = 0; n < sums.size(); ++n)
        sums[n] = layout.cell_sizes[n] ? sums[n] / layout.cell_sizes[n] : 0.0;
    return sums;
}

Image expand_to_pixels(const std::vector<double>& lattice_values, const CellLayout& layout) {
    if (static_cast<std::int64_t>(lattice_values.size()) != layout.lattice_size())
        throw std::invalid_argument("expand_to_pixels: lattice image does not match layout lattice");
    Image out(layout.grid.x, layout.grid.y);
    const std::int64_t m = layout.grid.pixel_count();
    for (std::int64_t i = 0; i < m; ++i)
        out.data[static_cast<size_t>(i)] = lattice_values[layout.pixel_to_cell[static_cast<size_t>(i)]];
    return out;
}

bool layouts_equal(const CellLayout& a, const CellLayout& b) {
    if (a.grid.x != b.grid.x || a.grid.y != b.grid.y) return false;
    if (a.cell_count != b.cell_count) return false;
    if (a.pixel_to_cell != b.pixel_to_cell) return false;
    if (a.cell_kind != b.cell_kind) return false;
    if (a.cell_sizes != b.cell_sizes) return false;
    if (a.lattice.index() != b.lattice.index()) return false;
    if (const auto* a1 = std::get_if<Lattice1D>(&a.lattice))
        return a1->length == std::get<Lattice1D>(b.lattice).length;
    const auto& a2 = std::get<Lattice2D>(a.lattice);
    const auto& b2 = std::get<Lattice2D>(b.lattice);
    return a2.u_count == b2.u_count && a2.v_count == b2.v_count && a2.empty == b2.empty;
}

}  // namespace uffsi
