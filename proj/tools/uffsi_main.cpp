#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "uffsi/compare.hpp"
#include "uffsi/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Exit codes: 0 ok, 2 config error, 3 I/O error, 4 numeric failure.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

enum class Structure { Circular, Rect, RotRect, Identity };

struct RunConfig {
    uffsi::PixelGrid grid;
    Structure structure = Structure::Identity;
    uffsi::CircularParams circular;
    uffsi::RotRectParams rotrect;  // also holds plain rect params
    uffsi::PatternSpec pattern;
    double sr = 0.0;           // exactly one of sr / budget is set
    std::int64_t budget = 0;
    uffsi::NoiseConfig noise;
    std::uint64_t seed = 0;
    double display_sigma = 0.0;
    std::string out;

    bool has_chart = false;
    uffsi::ChartSpec chart;

    bool has_compare = false;
    double sr_uffsi = 0.0, sr_hr = 0.0, sr_lr = 0.0;
    int lr_x = 0, lr_y = 0;

    std::uint64_t config_hash = 0;
};

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw config_error(path + ": expected an object");
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* a : allowed)
            if (item.key() == a) known = true;
        if (!known) throw config_error(path + ": unknown key '" + item.key() + "'");
    }
}

const json& need(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) throw config_error(path + ": missing key '" + key + "'");
    return j.at(key);
}

double need_number(const json& j, const std::string& path, const char* key) {
    const json& v = need(j, path, key);
    if (!v.is_number()) throw config_error(path + "." + key + ": expected a number");
    return v.get<double>();
}

int need_int(const json& j, const std::string& path, const char* key) {
    const json& v = need(j, path, key);
    if (!v.is_number_integer()) throw config_error(path + "." + key + ": expected an integer");
    return v.get<int>();
}

RunConfig parse_config(const json& j, std::uint64_t hash) {
    RunConfig cfg;
    cfg.config_hash = hash;
    check_keys(j, "config",
               {"version", "grid", "structure", "pattern", "sampling", "noise", "seed",
                "display_sigma", "out", "chart", "compare"});
    if (need_int(j, "config", "version") != 1)
        throw config_error("config.version: only version 1 is supported");

    const json& grid = need(j, "config", "grid");
    check_keys(grid, "grid", {"x", "y"});
    cfg.grid.x = need_int(grid, "grid", "x");
    cfg.grid.y = need_int(grid, "grid", "y");
    if (cfg.grid.x < 1 || cfg.grid.y < 1) throw config_error("grid: x and y must be >= 1");

    const json& st = need(j, "config", "structure");
    const json& type = need(st, "structure", "type");
    if (!type.is_string()) throw config_error("structure.type: expected a string");
    const std::string stype = type.get<std::string>();
    if (stype == "circular") {
        cfg.structure = Structure::Circular;
        check_keys(st, "structure", {"type", "center_x", "center_y", "r0", "epsilon", "q"});
        cfg.circular.center_x = need_number(st, "structure", "center_x");
        cfg.circular.center_y = need_number(st, "structure", "center_y");
        cfg.circular.r0 = need_number(st, "structure", "r0");
        cfg.circular.epsilon = need_number(st, "structure", "epsilon");
        cfg.circular.q_sectors = need_int(st, "structure", "q");
        if (!cfg.grid.contains(cfg.circular.center_x, cfg.circular.center_y))
            throw config_error("structure.center_x/center_y: center outside grid");
        if (!(cfg.circular.r0 >= 1.0)) throw config_error("structure.r0: must be >= 1");
        if (!(cfg.circular.epsilon > 1.0)) throw config_error("structure.epsilon: must be > 1");
        if (cfg.circular.q_sectors < 1) throw config_error("structure.q: must be >= 1");
    } else if (stype == "rect" || stype == "rotrect") {
        cfg.structure = stype == "rect" ? Structure::Rect : Structure::RotRect;
        if (stype == "rect")
            check_keys(st, "structure",
                       {"type", "center_x", "center_y", "m0", "n0", "alpha1", "alpha2"});
        else
            check_keys(st, "structure",
                       {"type", "center_x", "center_y", "m0", "n0", "alpha1", "alpha2", "theta"});
        uffsi::RectParams& r = cfg.rotrect.rect;
        r.center_x = need_int(st, "structure", "center_x");
        r.center_y = need_int(st, "structure", "center_y");
        r.m0 = need_int(st, "structure", "m0");
        r.n0 = need_int(st, "structure", "n0");
        r.alpha1 = need_number(st, "structure", "alpha1");
        r.alpha2 = need_number(st, "structure", "alpha2");
        if (r.center_x < 1 || r.center_x > cfg.grid.x || r.center_y < 1 || r.center_y > cfg.grid.y)
            throw config_error("structure.center_x/center_y: center outside grid");
        if (r.m0 < 1 || r.n0 < 1) throw config_error("structure.m0/n0: must be >= 1");
        if (!(r.alpha1 > 1.0) || !(r.alpha2 > 1.0))
            throw config_error("structure.alpha1/alpha2: must be > 1");
        if (stype == "rotrect") {
            cfg.rotrect.theta = need_number(st, "structure", "theta");
            if (!(cfg.rotrect.theta >= 0.0) || !(cfg.rotrect.theta < 1.5707963267948966))
                throw config_error("structure.theta: must lie in [0, pi/2)");
        }
    } else if (stype == "identity") {
        check_keys(st, "structure", {"type"});
        cfg.structure = Structure::Identity;
    } else {
        throw config_error("structure.type: expected circular | rect | rotrect | identity");
    }

    if (j.contains("pattern")) {
        const json& p = j.at("pattern");
        check_keys(p, "pattern", {"a", "b"});
        cfg.pattern.a = need_number(p, "pattern", "a");
        cfg.pattern.b = need_number(p, "pattern", "b");
        try {
            uffsi::validate(cfg.pattern);
        } catch (const std::invalid_argument& e) {
            throw config_error(std::string("pattern: ") + e.what());
        }
    }

    if (j.contains("sampling")) {
        const json& s = j.at("sampling");
        check_keys(s, "sampling", {"sr", "budget"});
        if (s.contains("sr") == s.contains("budget"))
            throw config_error("sampling: give exactly one of 'sr' or 'budget'");
        if (s.contains("sr")) {
            cfg.sr = need_number(s, "sampling", "sr");
            if (!(cfg.sr > 0.0) || !(cfg.sr <= 1.0))
                throw config_error("sampling.sr: must lie in (0, 1]");
        } else {
            cfg.budget = static_cast<std::int64_t>(need_number(s, "sampling", "budget"));
            if (cfg.budget < 4) throw config_error("sampling.budget: must be >= 4");
        }
    }

    if (j.contains("noise")) {
        const json& n = j.at("noise");
        check_keys(n, "noise", {"type", "sigma_rel"});
        const json& ntype = need(n, "noise", "type");
        if (!ntype.is_string()) throw config_error("noise.type: expected a string");
        const std::string nt = ntype.get<std::string>();
        if (nt == "none") {
            cfg.noise.kind = uffsi::NoiseConfig::Kind::None;
        } else if (nt == "gaussian") {
            cfg.noise.kind = uffsi::NoiseConfig::Kind::Gaussian;
            cfg.noise.sigma_rel = need_number(n, "noise", "sigma_rel");
            if (!(cfg.noise.sigma_rel >= 0.0))
                throw config_error("noise.sigma_rel: must be >= 0");
        } else {
            throw config_error("noise.type: expected none | gaussian");
        }
    }

    if (j.contains("seed")) {
        const json& s = j.at("seed");
        if (!s.is_number_unsigned()) throw config_error("seed: expected an unsigned integer");
        cfg.seed = s.get<std::uint64_t>();
    }
    if (j.contains("display_sigma")) {
        if (!j.at("display_sigma").is_number())
            throw config_error("display_sigma: expected a number");
        cfg.display_sigma = j.at("display_sigma").get<double>();
        if (!(cfg.display_sigma >= 0.0)) throw config_error("display_sigma: must be >= 0");
    }
    if (j.contains("out")) {
        if (!j.at("out").is_string()) throw config_error("out: expected a string");
        cfg.out = j.at("out").get<std::string>();
    }

    if (j.contains("chart")) {
        const json& c = j.at("chart");
        check_keys(c, "chart", {"roi", "periods"});
        const json& roi = need(c, "chart", "roi");
        if (!roi.is_array() || roi.size() != 4)
            throw config_error("chart.roi: expected [x0, y0, x1, y1]");
        cfg.chart.roi_x0 = roi[0].get<int>();
        cfg.chart.roi_y0 = roi[1].get<int>();
        cfg.chart.roi_x1 = roi[2].get<int>();
        cfg.chart.roi_y1 = roi[3].get<int>();
        if (c.contains("periods")) {
            if (!c.at("periods").is_array()) throw config_error("chart.periods: expected an array");
            cfg.chart.stripe_periods.clear();
            for (const auto& p : c.at("periods")) {
                if (!p.is_number_integer()) throw config_error("chart.periods: expected integers");
                cfg.chart.stripe_periods.push_back(p.get<int>());
                if (cfg.chart.stripe_periods.back() < 2)
                    throw config_error("chart.periods: must be >= 2");
            }
        }
        cfg.has_chart = true;
    }

    if (j.contains("compare")) {
        const json& c = j.at("compare");
        check_keys(c, "compare", {"sr_uffsi", "sr_hr", "sr_lr", "lr_x", "lr_y"});
        cfg.sr_uffsi = need_number(c, "compare", "sr_uffsi");
        cfg.sr_hr = need_number(c, "compare", "sr_hr");
        cfg.sr_lr = need_number(c, "compare", "sr_lr");
        for (double s : {cfg.sr_uffsi, cfg.sr_hr, cfg.sr_lr})
            if (!(s > 0.0) || !(s <= 1.0))
                throw config_error("compare: sampling ratios must lie in (0, 1]");
        if (c.contains("lr_x")) cfg.lr_x = need_int(c, "compare", "lr_x");
        if (c.contains("lr_y")) cfg.lr_y = need_int(c, "compare", "lr_y");
        cfg.has_compare = true;
    }
    return cfg;
}

RunConfig load_config(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw uffsi::io_error("cannot open config: " + path.string());
    std::ostringstream buf;
    buf << is.rdbuf();
    const std::string text = buf.str();
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("config parse error: ") + e.what());
    }
    try {
        return parse_config(j, uffsi::fnv1a64(text));
    } catch (const json::exception& e) {
        throw config_error(std::string("config error: ") + e.what());
    }
}

uffsi::CellLayout build_layout(const RunConfig& cfg) {
    switch (cfg.structure) {
        case Structure::Circular: return uffsi::build_circular_layout(cfg.circular, cfg.grid);
        case Structure::Rect: return uffsi::build_rect_layout(cfg.rotrect.rect, cfg.grid);
        case Structure::RotRect: return uffsi::build_rotrect_layout(cfg.rotrect, cfg.grid);
        case Structure::Identity: break;
    }
    return uffsi::build_identity_layout(cfg.grid);
}

uffsi::FrequencyPlan build_plan(const RunConfig& cfg, const uffsi::CellLayout& layout) {
    const uffsi::LatticeShape shape = uffsi::lattice_shape(layout);
    if (cfg.budget > 0) return uffsi::plan_with_count(shape, cfg.budget / 4);
    const double sr = cfg.sr > 0.0 ? cfg.sr : 1.0;
    return uffsi::plan_for_shape(shape, sr);
}

uffsi::Scene load_scene(const fs::path& path, const uffsi::PixelGrid& grid) {
    uffsi::Image img = uffsi::read_image(path);
    if (img.width < grid.x || img.height < grid.y)
        throw config_error("scene smaller than grid (no resampling of physics inputs)");
    if (img.width > grid.x || img.height > grid.y) {
        std::cerr << "warning: scene " << img.width << "x" << img.height
                  << " larger than grid, center-cropping\n";
        const int off_x = (img.width - grid.x) / 2;
        const int off_y = (img.height - grid.y) / 2;
        uffsi::Image crop(grid.x, grid.y);
        for (int y = 0; y < grid.y; ++y)
            for (int x = 0; x < grid.x; ++x) crop.at(x, y) = img.at(x + off_x, y + off_y);
        img = std::move(crop);
    }
    uffsi::Scene scene;
    scene.image = std::move(img);
    scene.id = path.filename().string();
    return scene;
}

fs::path resolve_out(const RunConfig& cfg, const std::string& flag_out) {
    const std::string dir = !flag_out.empty() ? flag_out : cfg.out;
    if (dir.empty()) throw config_error("no output directory (use --out or config 'out')");
    return fs::path(dir);
}

struct FreqArg {
    uffsi::FreqIndex f;
};

std::vector<uffsi::FreqIndex> parse_freq_args(const std::vector<std::string>& ks) {
    std::vector<uffsi::FreqIndex> out;
    for (const std::string& s : ks) {
        uffsi::FreqIndex f;
        const auto comma = s.find(',');
        try {
            if (comma == std::string::npos) {
                f.ku = std::stoi(s);
            } else {
                f.ku = std::stoi(s.substr(0, comma));
                f.kv = std::stoi(s.substr(comma + 1));
            }
        } catch (const std::logic_error&) {
            throw config_error("bad frequency index '" + s + "' (expected ku or ku,kv)");
        }
        out.push_back(f);
    }
    return out;
}

// Raw exports clamp-quantize the f64 data; the _norm twin is min-max
// normalized for display only. Metrics always run on the unnormalized data.
void write_image_outputs(const fs::path& stem, const uffsi::Image& img) {
    uffsi::write_pgm8(fs::path(stem).replace_extension(".pgm"), img);
    uffsi::write_png_gray8(fs::path(stem).replace_extension(".png"), img);
    uffsi::write_pgm8(fs::path(stem.string() + "_norm.pgm"), uffsi::normalize_for_display(img));
}

int cmd_layout(const RunConfig& cfg, const fs::path& out_dir) {
    const uffsi::CellLayout layout = build_layout(cfg);
    const uffsi::WeightVector weights = uffsi::compute_weights(layout);
    fs::create_directories(out_dir);
    uffsi::save_layout(out_dir / "layout.bin", layout, weights);
    uffsi::write_cell_map_pgm(out_dir / "cellmap.pgm", layout);
    const std::string summary = uffsi::layout_summary(layout);
    std::ofstream(out_dir / "summary.txt") << summary;
    std::cout << summary;
    return 0;
}

int cmd_patterns(const RunConfig& cfg, const fs::path& out_dir,
                 const std::vector<std::string>& ks) {
    if (ks.empty()) throw config_error("patterns: give at least one --k ku[,kv]");
    const uffsi::CellLayout layout = build_layout(cfg);
    const uffsi::WeightVector weights = uffsi::compute_weights(layout);
    const auto freqs = parse_freq_args(ks);
    fs::create_directories(out_dir);
    char name[96];
    for (const uffsi::FreqIndex f : freqs) {
        for (int p = 0; p < 4; ++p) {
            const uffsi::Image img =
                uffsi::synthesize_uffsi_pattern(layout, weights, f, uffsi::kPhases[p], cfg.pattern);
            std::snprintf(name, sizeof(name), "pattern_ku%+04d_kv%+04d_p%d.pgm", f.ku, f.kv, p);
            uffsi::write_pgm8(out_dir / name, img);
        }
    }
    std::cout << "wrote " << freqs.size() * 4 << " pattern images to " << out_dir.string() << "\n";
    return 0;
}

int cmd_simulate(const RunConfig& cfg, const fs::path& out_dir, const fs::path& scene_path,
                 int threads) {
    const uffsi::CellLayout layout = build_layout(cfg);
    const uffsi::WeightVector weights = uffsi::compute_weights(layout);
    const uffsi::Scene scene = load_scene(scene_path, cfg.grid);
    const uffsi::FrequencyPlan plan = build_plan(cfg, layout);

    uffsi::NoiseConfig noise = cfg.noise;
    noise.seed = cfg.seed;
    const uffsi::MeasurementSet ms =
        uffsi::run_acquisition(scene, layout, weights, plan, cfg.pattern, noise, threads);
    const uffsi::Spectrum spectrum = uffsi::assemble_spectrum(ms, plan, cfg.pattern);
    const uffsi::Image recon = uffsi::reconstruct(spectrum, layout);

    fs::create_directories(out_dir);
    uffsi::save_plan_csv(out_dir / "plan.csv", plan);
    uffsi::save_measurements_csv(out_dir / "measurements.csv", ms);
    uffsi::save_measurements_bin(out_dir / "measurements.bin", ms);
    uffsi::save_spectrum(out_dir / "spectrum.bin", spectrum);
    write_image_outputs(out_dir / "reconstruction", recon);
    if (cfg.display_sigma > 0.0)
        uffsi::write_pgm8(out_dir / "reconstruction_display.pgm",
                          uffsi::smooth_nroi(recon, layout, cfg.display_sigma));

    const uffsi::RoiMask roi = uffsi::roi_from_fovea(layout);
    const uffsi::RoiMask full = uffsi::roi_full(cfg.grid);
    std::ofstream mcsv(out_dir / "metrics.csv");
    mcsv << "metric,value\n";
    char buf[64];
    auto put = [&](const char* k, double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        mcsv << k << "," << buf << "\n";
    };
    if (roi.count() > 0) {
        put("roi_psnr_db", uffsi::psnr(recon, scene.image, roi));
        put("roi_ssim", uffsi::ssim(recon, scene.image, roi));
    }
    put("global_psnr_db", uffsi::psnr(recon, scene.image, full));
    put("global_ssim", uffsi::ssim(recon, scene.image, full));
    put("sr", plan.sr);
    put("n_measurements", static_cast<double>(plan.n_measurements()));
    std::cout << "simulated " << plan.n_measurements() << " measurements, outputs in "
              << out_dir.string() << "\n";
    return 0;
}

int cmd_compare(const RunConfig& cfg, const fs::path& out_dir, const fs::path& scene_path,
                int threads) {
    if (!cfg.has_compare && cfg.budget <= 0)
        throw config_error("compare: need a 'compare' block or sampling.budget");
    const uffsi::CellLayout layout = build_layout(cfg);
    const uffsi::Scene scene = load_scene(scene_path, cfg.grid);
    uffsi::RoiMask roi = uffsi::roi_from_fovea(layout);
    if (roi.count() == 0) roi = uffsi::roi_full(cfg.grid);

    uffsi::ComparisonSetup setup;
    setup.pattern = cfg.pattern;
    setup.noise = cfg.noise;
    setup.noise.seed = cfg.seed;
    setup.seed = cfg.seed;
    setup.config_hash = cfg.config_hash;
    setup.threads = threads;
    if (cfg.has_compare) {
        setup.sr_uffsi = cfg.sr_uffsi;
        setup.sr_hr = cfg.sr_hr;
        setup.sr_lr = cfg.sr_lr;
        setup.lr_x = cfg.lr_x;
        setup.lr_y = cfg.lr_y;
    } else {
        setup.budget = cfg.budget;
    }

    const uffsi::ComparisonReport report = uffsi::run_comparison(scene, roi, layout, setup);
    fs::create_directories(out_dir);
    uffsi::save_report_csv(out_dir / "report.csv", report);
    for (const auto& arm : report.arms)
        write_image_outputs(out_dir / ("recon_" + arm.name), arm.reconstruction);
    std::cout << uffsi::report_pretty(report);
    return 0;
}

int cmd_chart(const RunConfig& cfg, const fs::path& out_dir) {
    if (!cfg.has_chart) throw config_error("chart: config has no 'chart' block");
    const uffsi::Scene scene = uffsi::make_test_chart(cfg.grid.x, cfg.grid.y, cfg.chart);
    fs::create_directories(out_dir);
    uffsi::write_pgm8(out_dir / "chart.pgm", scene.image);
    std::cout << "wrote " << (out_dir / "chart.pgm").string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"uniform-sampling foveated Fourier single-pixel imaging toolkit"};
    app.require_subcommand(1);

    std::string config_path, scene_path, out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
    std::vector<std::string> k_args;

    auto add_common = [&](CLI::App* sub, bool needs_scene) {
        sub->add_option("--config", config_path, "config file (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory");
        auto* s = sub->add_option("--seed", seed, "RNG seed (overrides config)");
        s->each([&](const std::string&) { seed_set = true; });
        sub->add_option("--threads", threads, "worker threads (0 = auto)");
        if (needs_scene) sub->add_option("--scene", scene_path, "scene image (PGM/PNG)")->required();
    };

    CLI::App* c_layout = app.add_subcommand("layout", "build a cell layout and export it");
    add_common(c_layout, false);
    CLI::App* c_patterns = app.add_subcommand("patterns", "export pattern images");
    add_common(c_patterns, false);
    c_patterns->add_option("--k", k_args, "frequency index ku[,kv]; repeatable");
    CLI::App* c_simulate = app.add_subcommand("simulate", "acquire and reconstruct a scene");
    add_common(c_simulate, true);
    CLI::App* c_compare = app.add_subcommand("compare", "matched-budget comparison of three arms");
    add_common(c_compare, true);
    CLI::App* c_chart = app.add_subcommand("chart", "generate the synthetic test chart");
    add_common(c_chart, false);

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = load_config(config_path);
        if (seed_set) cfg.seed = seed;
        const fs::path out = resolve_out(cfg, out_dir);
        if (app.got_subcommand(c_layout)) return cmd_layout(cfg, out);
        if (app.got_subcommand(c_patterns)) return cmd_patterns(cfg, out, k_args);
        if (app.got_subcommand(c_simulate)) return cmd_simulate(cfg, out, scene_path, threads);
        if (app.got_subcommand(c_compare)) return cmd_compare(cfg, out, scene_path, threads);
        if (app.got_subcommand(c_chart)) return cmd_chart(cfg, out);
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const uffsi::io_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
