#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "uffsi/io.hpp"

using namespace uffsi;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("uffsi_test_" + std::to_string(
                                    static_cast<unsigned long long>(oracles::Rng(
                                        std::hash<const void*>{}(this)).next())));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("pgm: 8-bit write/read round trip") {
    TempDir tmp;
    const Image img = oracles::random_image(31, 17, 4);
    const fs::path p = tmp.path / "a.pgm";
    write_pgm8(p, img);
    const Image back = read_pgm(p);
    REQUIRE(back.same_shape(img));
    for (size_t i = 0; i < img.data.size(); ++i)
        CHECK(std::abs(back.data[i] - img.data[i]) <= 0.5 / 255.0 + 1e-12);
    // a second write of the decoded image reproduces the file byte for byte
    const fs::path q = tmp.path / "b.pgm";
    write_pgm8(q, back);
    CHECK(slurp(p) == slurp(q));
}

TEST_CASE("pgm: 16-bit input with comments") {
    TempDir tmp;
    const fs::path p = tmp.path / "wide.pgm";
    {
        std::ofstream os(p, std::ios::binary);
        os << "P5\n# a comment\n3 2\n65535\n";
        const std::uint16_t vals[6] = {0, 1000, 30000, 40000, 65535, 2};
        for (std::uint16_t v : vals) {
            os.put(static_cast<char>(v >> 8));
            os.put(static_cast<char>(v & 0xFF));
        }
    }
    const Image img = read_pgm(p);
    REQUIRE(img.width == 3);
    REQUIRE(img.height == 2);
    CHECK(img.at(0, 0) == 0.0);
    CHECK(img.at(1, 0) == doctest::Approx(1000.0 / 65535.0).epsilon(1e-12));
    CHECK(img.at(1, 1) == 1.0);
}

TEST_CASE("pgm: malformed headers are rejected") {
    TempDir tmp;
    const fs::path p = tmp.path / "bad.pgm";
    std::ofstream(p, std::ios::binary) << "P6\n2 2\n255\nxxxxxxxxxxxx";
    CHECK_THROWS_AS(read_pgm(p), io_error);
    CHECK_THROWS_AS(read_pgm(tmp.path / "missing.pgm"), io_error);
}

TEST_CASE("png: 8-bit grayscale write/read round trip") {
    TempDir tmp;
    const Image img = oracles::random_image(23, 29, 6);
    const fs::path p = tmp.path / "a.png";
    write_png_gray8(p, img);
    const Image back = read_png_gray(p);
    REQUIRE(back.same_shape(img));
    for (size_t i = 0; i < img.data.size(); ++i)
        CHECK(std::abs(back.data[i] - img.data[i]) <= 0.5 / 255.0 + 1e-12);
    CHECK(read_image(p).data == back.data);
}

TEST_CASE("layout container: all structures round trip") {
    TempDir tmp;
    std::vector<CellLayout> layouts;
    layouts.push_back(build_circular_layout({12.5, 11.0, 3.0, 1.6, 10}, {24, 22}));
    layouts.push_back(build_rect_layout({10, 12, 3, 4, 1.5, 1.7}, {21, 23}));
    layouts.push_back(build_rotrect_layout({{10, 12, 3, 4, 1.5, 1.7}, 0.5}, {21, 23}));
    layouts.push_back(build_identity_layout({9, 7}));
    int idx = 0;
    for (const CellLayout& layout : layouts) {
        CAPTURE(idx);
        const WeightVector weights = compute_weights(layout);
        const fs::path p = tmp.path / ("layout" + std::to_string(idx++) + ".bin");
        save_layout(p, layout, weights);
        CellLayout loaded;
        WeightVector wl;
        load_layout(p, loaded, wl);
        CHECK(layouts_equal(layout, loaded));
        CHECK(wl.w == weights.w);
    }
}

TEST_CASE("layout summary states the counts and the redundancy") {
    const CellLayout layout = build_circular_layout({16.5, 16.5, 4.0, 1.5, 12}, {32, 32});
    const std::string s = layout_summary(layout);
    CHECK(s.find("cells: " + std::to_string(layout.cell_count)) != std::string::npos);
    CHECK(s.find("redundancy reduction:") != std::string::npos);
    CHECK(s.find("cell bound") != std::string::npos);
}

TEST_CASE("cell map export is a readable PGM of the right shape") {
    TempDir tmp;
    const CellLayout layout = build_rect_layout({8, 8, 2, 2, 1.5, 1.5}, {16, 16});
    const fs::path p = tmp.path / "cells.pgm";
    write_cell_map_pgm(p, layout);
    const Image img = read_pgm(p);
    CHECK(img.width == 16);
    CHECK(img.height == 16);
}

TEST_CASE("measurements: CSV and binary twins round trip losslessly") {
    TempDir tmp;
    const CellLayout layout = build_rect_layout({9, 9, 3, 3, 1.5, 1.5}, {18, 18});
    const FrequencyPlan plan = make_frequency_plan(layout, 0.5);
    Scene scene;
    scene.image = oracles::random_image(18, 18, 12);
    NoiseConfig noise;
    noise.kind = NoiseConfig::Kind::Gaussian;
    noise.sigma_rel = 0.05;
    noise.seed = 4242;
    const MeasurementSet ms =
        run_acquisition(scene, layout, compute_weights(layout), plan, {}, noise, 1);

    const fs::path pcsv = tmp.path / "m.csv";
    save_measurements_csv(pcsv, ms);
    const MeasurementSet mc = load_measurements_csv(pcsv);
    CHECK(mc.plan.shape == ms.plan.shape);
    CHECK(mc.plan.sr == ms.plan.sr);
    CHECK(mc.noise.kind == ms.noise.kind);
    CHECK(mc.noise.sigma_rel == ms.noise.sigma_rel);
    CHECK(mc.noise.seed == ms.noise.seed);
    REQUIRE(mc.readings.size() == ms.readings.size());
    for (size_t i = 0; i < ms.readings.size(); ++i) CHECK(mc.readings[i] == ms.readings[i]);
    REQUIRE(mc.plan.freqs.size() == ms.plan.freqs.size());
    for (size_t i = 0; i < ms.plan.freqs.size(); ++i) CHECK(mc.plan.freqs[i] == ms.plan.freqs[i]);

    const fs::path pbin = tmp.path / "m.bin";
    save_measurements_bin(pbin, ms);
    const MeasurementSet mb = load_measurements_bin(pbin);
    CHECK(mb.plan.shape == ms.plan.shape);
    REQUIRE(mb.readings.size() == ms.readings.size());
    for (size_t i = 0; i < ms.readings.size(); ++i) CHECK(mb.readings[i] == ms.readings[i]);
}

TEST_CASE("spectrum dump round trips bitwise") {
    TempDir tmp;
    const CellLayout layout = build_identity_layout({6, 5});
    const FrequencyPlan plan = make_frequency_plan(layout, 0.7);
    Scene scene;
    scene.image = oracles::random_image(6, 5, 3);
    const MeasurementSet ms =
        run_acquisition(scene, layout, compute_weights(layout), plan, {}, {}, 1);
    const Spectrum s = assemble_spectrum(ms, plan, {});
    const fs::path p = tmp.path / "s.bin";
    save_spectrum(p, s);
    const Spectrum back = load_spectrum(p);
    CHECK(back.shape == s.shape);
    REQUIRE(back.coeffs.size() == s.coeffs.size());
    for (size_t i = 0; i < s.coeffs.size(); ++i) {
        CHECK(back.coeffs[i].real() == s.coeffs[i].real());
        CHECK(back.coeffs[i].imag() == s.coeffs[i].imag());
        CHECK(back.measured[i] == s.measured[i]);
    }
}

TEST_CASE("plan CSV lists one row per frequency") {
    TempDir tmp;
    const CellLayout layout = build_identity_layout({12, 10});
    const FrequencyPlan plan = make_frequency_plan(layout, 0.25);
    const fs::path p = tmp.path / "plan.csv";
    save_plan_csv(p, plan);
    std::ifstream is(p);
    std::string line;
    std::int64_t rows = 0;
    bool header = false;
    while (std::getline(is, line)) {
        if (line.rfind("index,", 0) == 0) header = true;
        else if (!line.empty() && line[0] != '#') ++rows;
    }
    CHECK(header);
    CHECK(rows == plan.n_freq());
}

TEST_CASE("report CSV carries provenance and one row per arm") {
    TempDir tmp;
    ComparisonReport report;
    report.seed = 11;
    report.config_hash = 22;
    report.warnings.push_back("sample warning");
    for (const char* name : {"uffsi", "fsi_hr", "fsi_lr"}) {
        ComparisonArm arm;
        arm.name = name;
        arm.roi_psnr_db = std::numeric_limits<double>::infinity();
        report.arms.push_back(std::move(arm));
    }
    const fs::path p = tmp.path / "report.csv";
    save_report_csv(p, report);
    const std::string text = slurp(p);
    CHECK(text.find("seed=11") != std::string::npos);
    CHECK(text.find("config_hash=22") != std::string::npos);
    CHECK(text.find("sample warning") != std::string::npos);
    CHECK(text.find("uffsi,") != std::string::npos);
    CHECK(text.find("inf") != std::string::npos);
    const std::string pretty = report_pretty(report);
    CHECK(pretty.find("uffsi") != std::string::npos);
}

TEST_CASE("normalize_for_display maps the range to [0,1] and flattens constants") {
    Image img(4, 1);
    img.data = {2.0, 3.0, 4.0, 6.0};
    const Image out = normalize_for_display(img);
    CHECK(out.data[0] == 0.0);
    CHECK(out.data[3] == 1.0);
    CHECK(out.data[1] == doctest::Approx(0.25));
    const Image flat(5, 5, 3.3);
    for (double v : normalize_for_display(flat).data) CHECK(v == 0.0);
}

TEST_CASE("fnv1a64 is stable") {
    CHECK(fnv1a64(std::string{}) == 0xcbf29ce484222325ull);
    CHECK(fnv1a64(std::string{"a"}) == 0xaf63dc4c8601ec8cull);
    CHECK(fnv1a64(std::string{"abc"}) == fnv1a64(std::string{"abc"}));
}
