#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "oracles.hpp"
#include "uffsi/layout.hpp"

using namespace uffsi;

namespace {

// Independent circular classification for small grids: reimplements the
// fovea/ring/sector rule directly from the radius and angle definitions.
struct CircOracle {
    std::vector<int> label;  // per pixel: -1-x fovea marker or ring*Q+sector
    std::int64_t distinct_cells = 0;

    CircOracle(const CircularParams& p, const PixelGrid& g) {
        double maxd = 0.0;
        for (int cy : {1, g.y})
            for (int cx : {1, g.x})
                maxd = std::max(maxd, std::hypot(cx - p.center_x, cy - p.center_y));
        label.resize(static_cast<size_t>(g.pixel_count()));
        std::set<int> cells;
        std::int64_t m = 0;
        for (int y = 1; y <= g.y; ++y) {
            for (int x = 1; x <= g.x; ++x, ++m) {
                const double r = std::hypot(x - p.center_x, y - p.center_y);
                if (r <= p.r0) {
                    label[static_cast<size_t>(m)] = -1 - static_cast<int>(m);
                    ++distinct_cells;
                    continue;
                }
                int ring = 1;
                while (p.r0 * std::pow(p.epsilon, ring) < r) ++ring;
                double omega = std::atan2(y - p.center_y, x - p.center_x);
                if (omega < 0) omega += 2.0 * std::numbers::pi;
                int q = static_cast<int>(std::floor(omega * p.q_sectors / (2.0 * std::numbers::pi)));
                q = std::min(q, p.q_sectors - 1);
                label[static_cast<size_t>(m)] = ring * p.q_sectors + q;
                cells.insert(label[static_cast<size_t>(m)]);
            }
        }
        distinct_cells += static_cast<std::int64_t>(cells.size());
    }
};

CellLayout circ(double cx, double cy, double r0, double eps, int q, int gx, int gy) {
    return build_circular_layout({cx, cy, r0, eps, q}, {gx, gy});
}

}  // namespace

TEST_CASE("circular: fovea covering the FOV gives the identity partition") {
    // max corner distance for an 8x8 grid from (4.5, 4.5) is hypot(3.5, 3.5) ~ 4.9497
    const CellLayout layout = circ(4.5, 4.5, 4.95, 2.0, 4, 8, 8);
    CHECK(layout.cell_count == 64);
    CHECK(layout.fovea_cell_count() == 64);
    for (std::uint32_t i = 0; i < 64; ++i) CHECK(layout.pixel_to_cell[i] == i);
    CHECK(oracles::partition_ok(layout));
    const auto& meta = std::get<CircularMeta>(layout.meta);
    CHECK(meta.ring_count == 0);
}

TEST_CASE("circular: every pixel lands in exactly one cell on a 128x128 grid") {
    const CellLayout layout = circ(64.5, 64.5, 8.0, 1.35, 24, 128, 128);
    CHECK(oracles::partition_ok(layout));
    std::int64_t total = 0;
    for (auto s : layout.cell_sizes) total += s;
    CHECK(total == 128 * 128);
    CHECK(layout.cell_count <= 128 * 128);
}

TEST_CASE("circular: matches the exhaustive ring/sector oracle on 8x8") {
    const CircularParams params{4.5, 4.5, 2.0, 2.0, 4};
    const PixelGrid grid{8, 8};
    const CellLayout layout = build_circular_layout(params, grid);
    const CircOracle oracle(params, grid);

    CHECK(layout.cell_count == oracle.distinct_cells);
    // partitions must agree pixel-for-pixel
    std::map<int, std::uint32_t> fwd;
    std::map<std::uint32_t, int> rev;
    for (size_t m = 0; m < layout.pixel_to_cell.size(); ++m) {
        const int lo = oracle.label[m];
        const std::uint32_t lc = layout.pixel_to_cell[m];
        auto f = fwd.find(lo);
        if (f == fwd.end())
            fwd.emplace(lo, lc);
        else
            CHECK(f->second == lc);
        auto r = rev.find(lc);
        if (r == rev.end())
            rev.emplace(lc, lo);
        else
            CHECK(r->second == lo);
    }
}

TEST_CASE("circular: log-polar lattice metadata is uniform and covering") {
    const CellLayout layout = circ(33.0, 29.5, 3.0, 1.4, 12, 64, 64);
    const auto& meta = std::get<CircularMeta>(layout.meta);
    REQUIRE(meta.ring_count >= 2);
    // coverage: outermost radius reaches the farthest corner
    double maxd = 0.0;
    for (int cy : {1, 64})
        for (int cx : {1, 64}) maxd = std::max(maxd, std::hypot(cx - 33.0, cy - 29.5));
    CHECK(meta.ring_outer_radii.back() >= maxd);
    // smallest covering count: one ring less must not cover
    CHECK(meta.ring_outer_radii[meta.ring_outer_radii.size() - 2] < maxd);
    // the log-polar coordinates advance by exactly 1 per ring
    for (size_t i = 1; i < meta.log_coords.size(); ++i)
        CHECK(meta.log_coords[i] - meta.log_coords[i - 1] ==
              doctest::Approx(1.0).epsilon(1e-9));
    // cell bound from the ring/sector grid
    CHECK(layout.cell_count <=
          meta.fovea_cell_count + static_cast<std::int64_t>(meta.ring_count) * meta.q_sectors);
    // fovea cells are the pixels within r0, each a singleton
    std::int64_t within = 0;
    for (int y = 1; y <= 64; ++y)
        for (int x = 1; x <= 64; ++x)
            if (std::hypot(x - 33.0, y - 29.5) <= 3.0) ++within;
    CHECK(meta.fovea_cell_count == within);
}

TEST_CASE("circular: fovea pixels are singleton cells") {
    const CellLayout layout = circ(20.0, 40.0, 6.5, 1.5, 16, 96, 96);
    std::int64_t m = 0;
    for (int y = 1; y <= 96; ++y) {
        for (int x = 1; x <= 96; ++x, ++m) {
            if (std::hypot(x - 20.0, y - 40.0) <= 6.5) {
                const std::uint32_t c = layout.pixel_to_cell[static_cast<size_t>(m)];
                CHECK(layout.cell_sizes[c] == 1);
                CHECK(layout.cell_kind[c] == CellKind::Fovea);
            }
        }
    }
}

TEST_CASE("circular: increasing epsilon never increases the cell count") {
    std::int64_t prev = -1;
    for (double eps : {1.2, 1.5, 2.0, 3.0, 5.0}) {
        const CellLayout layout = circ(64.5, 64.5, 5.0, eps, 20, 128, 128);
        if (prev >= 0) CHECK(layout.cell_count <= prev);
        prev = layout.cell_count;
    }
}

TEST_CASE("circular: parameter errors") {
    CHECK_THROWS_AS(circ(200.0, 64.0, 5.0, 2.0, 8, 128, 128), std::invalid_argument);
    CHECK_THROWS_AS(circ(64.0, 64.0, 5.0, 1.0, 8, 128, 128), std::invalid_argument);
    CHECK_THROWS_AS(circ(64.0, 64.0, 0.5, 2.0, 8, 128, 128), std::invalid_argument);
    CHECK_THROWS_AS(circ(64.0, 64.0, 5.0, 2.0, 0, 128, 128), std::invalid_argument);
}

TEST_CASE("rect: ROI covering the grid gives the identity layout") {
    const CellLayout layout = build_rect_layout({33, 33, 32, 32, 2.0, 2.0}, {65, 65});
    CHECK(layout.cell_count == 65 * 65);
    CHECK(oracles::partition_ok(layout));
    for (auto s : layout.cell_sizes) CHECK(s == 1);
    const auto& lat = std::get<Lattice2D>(layout.lattice);
    CHECK(lat.u_count == 65);
    CHECK(lat.v_count == 65);
}

TEST_CASE("rect: axis centers match the hand-evaluated layer radii on 33x33") {
    const CellLayout layout = build_rect_layout({17, 17, 4, 4, 2.0, 2.0}, {33, 33});
    const auto& meta = std::get<RectMeta>(layout.meta);
    // radii 1..4 linear, then 4*2 = 8 and 4*4 = 16, clamped at 1 and 33
    const std::vector<int> expected = {1, 9, 13, 14, 15, 16, 17, 18, 19, 20, 21, 25, 33};
    CHECK(meta.x_centers == expected);
    CHECK(meta.y_centers == expected);
    CHECK(oracles::partition_ok(layout));
}

TEST_CASE("rect: partition is total and disjoint for random parameters") {
    oracles::Rng rng(0x5eedu);
    for (int i = 0; i < 20; ++i) {
        const int gx = rng.range(9, 80), gy = rng.range(9, 80);
        RectParams p;
        p.center_x = rng.range(1, gx);
        p.center_y = rng.range(1, gy);
        p.m0 = rng.range(1, 8);
        p.n0 = rng.range(1, 8);
        p.alpha1 = 1.1 + rng.uniform() * 2.0;
        p.alpha2 = 1.1 + rng.uniform() * 2.0;
        const CellLayout layout = build_rect_layout(p, {gx, gy});
        CAPTURE(i);
        CHECK(oracles::partition_ok(layout));
        // 2D rect lattices never contain empty cells
        CHECK(layout.cell_count == layout.lattice_size());
    }
}

TEST_CASE("rect: pixels strictly inside the ROI box are singleton fovea cells") {
    const CellLayout layout = build_rect_layout({24, 30, 6, 5, 1.7, 2.2}, {64, 64});
    std::int64_t m = 0;
    for (int y = 1; y <= 64; ++y) {
        for (int x = 1; x <= 64; ++x, ++m) {
            if (std::abs(x - 24) < 6 && std::abs(y - 30) < 5) {
                const std::uint32_t c = layout.pixel_to_cell[static_cast<size_t>(m)];
                CHECK(layout.cell_sizes[c] == 1);
                CHECK(layout.cell_kind[c] == CellKind::Fovea);
            }
        }
    }
    // fovea cells never extend past the closed box
    m = 0;
    for (int y = 1; y <= 64; ++y) {
        for (int x = 1; x <= 64; ++x, ++m) {
            const std::uint32_t c = layout.pixel_to_cell[static_cast<size_t>(m)];
            if (layout.cell_kind[c] == CellKind::Fovea) {
                CHECK(std::abs(x - 24) <= 6);
                CHECK(std::abs(y - 30) <= 5);
            }
        }
    }
}

TEST_CASE("rect: increasing growth factors never increases the cell count") {
    std::int64_t prev = -1;
    for (double a : {1.15, 1.4, 1.9, 3.0}) {
        const CellLayout layout = build_rect_layout({64, 64, 10, 10, a, a}, {128, 128});
        if (prev >= 0) CHECK(layout.cell_count <= prev);
        prev = layout.cell_count;
    }
}

TEST_CASE("rect: parameter errors") {
    CHECK_THROWS_AS(build_rect_layout({70, 30, 4, 4, 2.0, 2.0}, {64, 64}), std::invalid_argument);
    CHECK_THROWS_AS(build_rect_layout({30, 30, 0, 4, 2.0, 2.0}, {64, 64}), std::invalid_argument);
    CHECK_THROWS_AS(build_rect_layout({30, 30, 4, 4, 1.0, 2.0}, {64, 64}), std::invalid_argument);
}

TEST_CASE("rotrect: zero rotation reproduces the rectangular layout bit for bit") {
    oracles::Rng rng(0x707a7eull);
    for (int i = 0; i < 10; ++i) {
        const int gx = rng.range(10, 72), gy = rng.range(10, 72);
        RectParams p;
        p.center_x = rng.range(1, gx);
        p.center_y = rng.range(1, gy);
        p.m0 = rng.range(1, 7);
        p.n0 = rng.range(1, 7);
        p.alpha1 = 1.15 + rng.uniform() * 1.5;
        p.alpha2 = 1.15 + rng.uniform() * 1.5;
        const CellLayout rect = build_rect_layout(p, {gx, gy});
        const CellLayout rot = build_rotrect_layout({p, 0.0}, {gx, gy});
        CAPTURE(i);
        CHECK(layouts_equal(rect, rot));
    }
}

TEST_CASE("rotrect: rotated partition is total; empty lattice cells carry no pixels") {
    const CellLayout layout = build_rotrect_layout({{32, 32, 6, 4, 1.5, 1.5}, 0.3}, {64, 64});
    CHECK(oracles::partition_ok(layout));
    CHECK(layout.cell_count <= layout.lattice_size());
    const auto& lat = std::get<Lattice2D>(layout.lattice);
    bool has_empty = false;
    for (std::int64_t n = 0; n < layout.lattice_size(); ++n) {
        if (lat.empty[static_cast<size_t>(n)]) {
            has_empty = true;
            CHECK(layout.cell_sizes[static_cast<size_t>(n)] == 0);
        }
    }
    CHECK(has_empty);  // a 0.3 rad rotation pushes lattice corners outside the FOV
}

TEST_CASE("rotrect: interior cell sizes track the unrotated layout statistically") {
    // The rotated frame sees the same unit-density pixel lattice, so away from
    // the FOV boundary the per-cell pixel counts should match the theta = 0
    // layout up to rounding at cell borders. Statistical check, not an identity.
    RectParams p{64, 64, 8, 8, 1.4, 1.4};
    const CellLayout a = build_rotrect_layout({p, 0.35}, {128, 128});
    const CellLayout b = build_rect_layout(p, {128, 128});
    const auto& ma = std::get<RectMeta>(a.meta);
    const auto& mb = std::get<RectMeta>(b.meta);
    const auto& la = std::get<Lattice2D>(a.lattice);
    const auto& lb = std::get<Lattice2D>(b.lattice);
    const int ca_u = static_cast<int>(std::find(ma.x_centers.begin(), ma.x_centers.end(), 64) -
                                      ma.x_centers.begin());
    const int ca_v = static_cast<int>(std::find(ma.y_centers.begin(), ma.y_centers.end(), 64) -
                                      ma.y_centers.begin());
    const int cb_u = static_cast<int>(std::find(mb.x_centers.begin(), mb.x_centers.end(), 64) -
                                      mb.x_centers.begin());
    const int cb_v = static_cast<int>(std::find(mb.y_centers.begin(), mb.y_centers.end(), 64) -
                                      mb.y_centers.begin());

    double abs_diff = 0.0, total = 0.0;
    for (int dv = -11; dv <= 11; ++dv) {
        for (int du = -11; du <= 11; ++du) {
            const int au = ca_u + du, av = ca_v + dv;
            const int bu = cb_u + du, bv = cb_v + dv;
            REQUIRE(au >= 0);
            REQUIRE(av >= 0);
            REQUIRE(bu >= 0);
            REQUIRE(bv >= 0);
            REQUIRE(au < la.u_count);
            REQUIRE(av < la.v_count);
            REQUIRE(bu < lb.u_count);
            REQUIRE(bv < lb.v_count);
            const double sa = a.cell_sizes[static_cast<size_t>(av) * la.u_count + au];
            const double sb = b.cell_sizes[static_cast<size_t>(bv) * lb.u_count + bu];
            abs_diff += std::abs(sa - sb);
            total += sb;
        }
    }
    CHECK(total > 0);
    CHECK(abs_diff / total < 0.25);
}

TEST_CASE("rotrect: theta outside [0, pi/2) is rejected") {
    RectParams p{32, 32, 4, 4, 2.0, 2.0};
    CHECK_THROWS_AS(build_rotrect_layout({p, -0.1}, {64, 64}), std::invalid_argument);
    CHECK_THROWS_AS(build_rotrect_layout({p, 1.5807963}, {64, 64}), std::invalid_argument);
}

TEST_CASE("weights: singleton cells weigh 1, k-pixel cells weigh 1/k, empty cells 0") {
    const CellLayout identity = build_identity_layout({16, 16});
    const WeightVector wi = compute_weights(identity);
    for (double w : wi.w) CHECK(w == 1.0);

    const CellLayout layout = build_rect_layout({9, 9, 2, 2, 2.0, 2.0}, {17, 17});
    const WeightVector w = compute_weights(layout);
    bool saw_multi = false;
    for (size_t n = 0; n < w.w.size(); ++n) {
        const auto sz = layout.cell_sizes[n];
        if (sz == 0) {
            CHECK(w.w[n] == 0.0);
        } else {
            CHECK(w.w[n] == 1.0 / sz);  // exact division check
            if (sz == 4) {
                CHECK(w.w[n] == 0.25);
                saw_multi = true;
            }
        }
    }
    CHECK(saw_multi);
    // sum of w(n) |cell n| over non-empty cells equals their count, exactly as rationals
    std::int64_t nonempty = 0;
    for (auto sz : layout.cell_sizes) nonempty += sz > 0;
    double acc = 0.0;
    for (size_t n = 0; n < w.w.size(); ++n) acc += w.w[n] * layout.cell_sizes[n];
    CHECK(acc == doctest::Approx(static_cast<double>(nonempty)).epsilon(1e-12));
}

TEST_CASE("cell_average: constants, identity, and a brute-force grouping oracle") {
    const CellLayout layout = circ(8.5, 8.5, 2.5, 1.6, 6, 16, 16);
    const Image constant(16, 16, 0.37);
    for (double v : cell_average(constant, layout)) CHECK(v == doctest::Approx(0.37).epsilon(1e-15));

    const CellLayout identity = build_identity_layout({16, 16});
    const Image scene = oracles::random_image(16, 16, 42);
    const auto through = cell_average(scene, identity);
    for (size_t i = 0; i < through.size(); ++i) CHECK(through[i] == scene.data[i]);

    const auto averaged = cell_average(scene, layout);
    std::vector<double> sums(static_cast<size_t>(layout.lattice_size()), 0.0);
    std::vector<int> counts(static_cast<size_t>(layout.lattice_size()), 0);
    for (size_t m = 0; m < scene.data.size(); ++m) {
        sums[layout.pixel_to_cell[m]] += scene.data[m];
        counts[layout.pixel_to_cell[m]]++;
    }
    for (size_t n = 0; n < sums.size(); ++n) {
        const double want = counts[n] ? sums[n] / counts[n] : 0.0;
        CHECK(averaged[n] == doctest::Approx(want).epsilon(1e-12));
    }

    CHECK_THROWS_AS(cell_average(Image(8, 8), layout), std::invalid_argument);
}

TEST_CASE("expand_to_pixels: identity, round trip, one-hot masks") {
    const CellLayout identity = build_identity_layout({12, 12});
    const Image scene = oracles::random_image(12, 12, 7);
    const Image out = expand_to_pixels(scene.data, identity);
    for (size_t i = 0; i < out.data.size(); ++i) CHECK(out.data[i] == scene.data[i]);

    const CellLayout layout = build_rect_layout({7, 7, 2, 2, 1.8, 1.8}, {13, 13});
    std::vector<double> lattice_values(static_cast<size_t>(layout.lattice_size()));
    oracles::Rng rng(11);
    for (auto& v : lattice_values) v = rng.uniform();
    const Image px = expand_to_pixels(lattice_values, layout);
    const auto round_trip = cell_average(px, layout);
    for (size_t n = 0; n < lattice_values.size(); ++n) {
        if (layout.cell_sizes[n] == 0) continue;
        CHECK(round_trip[n] == doctest::Approx(lattice_values[n]).epsilon(1e-13));
    }

    // one-hot lattice image -> binary mask with |cell| ones
    for (size_t hot : {size_t{0}, lattice_values.size() / 2, lattice_values.size() - 1}) {
        std::vector<double> onehot(lattice_values.size(), 0.0);
        onehot[hot] = 1.0;
        const Image mask = expand_to_pixels(onehot, layout);
        double count = 0.0;
        for (double v : mask.data) {
            CHECK((v == 0.0 || v == 1.0));
            count += v;
        }
        CHECK(count == static_cast<double>(layout.cell_sizes[hot]));
    }

    CHECK_THROWS_AS(expand_to_pixels(std::vector<double>(3), layout), std::invalid_argument);
}

TEST_CASE("partition fuzz across all three structures") {
    oracles::Rng rng(0xabcdefu);
    for (int i = 0; i < 30; ++i) {
        const int gx = rng.range(8, 128), gy = rng.range(8, 128);
        CAPTURE(i);
        switch (i % 3) {
            case 0: {
                CircularParams p;
                p.center_x = 1.0 + rng.uniform() * (gx - 1);
                p.center_y = 1.0 + rng.uniform() * (gy - 1);
                p.r0 = 1.0 + rng.uniform() * 10.0;
                p.epsilon = 1.05 + rng.uniform() * 2.0;
                p.q_sectors = rng.range(1, 40);
                CHECK(oracles::partition_ok(build_circular_layout(p, {gx, gy})));
                break;
            }
            case 1: {
                RectParams p;
                p.center_x = rng.range(1, gx);
                p.center_y = rng.range(1, gy);
                p.m0 = rng.range(1, 10);
                p.n0 = rng.range(1, 10);
                p.alpha1 = 1.05 + rng.uniform() * 2.0;
                p.alpha2 = 1.05 + rng.uniform() * 2.0;
                CHECK(oracles::partition_ok(build_rect_layout(p, {gx, gy})));
                break;
            }
            default: {
                RotRectParams p;
                p.rect.center_x = rng.range(1, gx);
                p.rect.center_y = rng.range(1, gy);
                p.rect.m0 = rng.range(1, 10);
                p.rect.n0 = rng.range(1, 10);
                p.rect.alpha1 = 1.05 + rng.uniform() * 2.0;
                p.rect.alpha2 = 1.05 + rng.uniform() * 2.0;
                p.theta = rng.uniform() * 1.57;
                CHECK(oracles::partition_ok(build_rotrect_layout(p, {gx, gy})));
                break;
            }
        }
    }
}
