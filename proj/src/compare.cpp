#include "uffsi/compare.hpp"

#include <cmath>
#include <stdexcept>

namespace uffsi {

namespace {

int lr_bucket(int hr, int lr, int coord) {
    return static_cast<int>(static_cast<std::int64_t>(coord) * lr / hr);
}

struct ArmInput {
    std::string name;
    CellLayout layout;
    Scene scene;          // the scene this arm actually images
    std::int64_t data_count = 0;
    double redundancy = 0.0;
    bool upsample = false;  // expand LR reconstruction for metric comparison
};

}  // namespace

Image box_downsample(const Image& img, int lr_w, int lr_h) {
    if (lr_w < 1 || lr_h < 1 || lr_w > img.width || lr_h > img.height)
        throw std::invalid_argument("box_downsample: target must be within source dimensions");
    Image out(lr_w, lr_h);
    std::vector<double> counts(out.data.size(), 0.0);
    for (int y = 0; y < img.height; ++y) {
        const int v = lr_bucket(img.height, lr_h, y);
        for (int x = 0; x < img.width; ++x) {
            const int u = lr_bucket(img.width, lr_w, x);
            out.at(u, v) += img.at(x, y);
            counts[static_cast<size_t>(v) * lr_w + u] += 1.0;
        }
    }
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] /= counts[i];
    return out;
}

Image replicate_upsample(const Image& lr, int w, int h) {
    if (lr.width > w || lr.height > h)
        throw std::invalid_argument("replicate_upsample: target smaller than source");
    Image out(w, h);
    for (int y = 0; y < h; ++y) {
        const int v = lr_bucket(h, lr.height, y);
        for (int x = 0; x < w; ++x) out.at(x, y) = lr.at(lr_bucket(w, lr.width, x), v);
    }
    return out;
}

ComparisonReport run_comparison(const Scene& scene, const RoiMask& roi,
                                const CellLayout& foveated, const ComparisonSetup& setup) {
    validate(setup.pattern);
    if (scene.image.width != foveated.grid.x || scene.image.height != foveated.grid.y)
        throw std::invalid_argument("run_comparison: scene dimensions do not match layout");
    if (roi.width != scene.image.width || roi.height != scene.image.height)
        throw std::invalid_argument("run_comparison: ROI mask dimensions do not match scene");
    if (roi.count() == 0) throw std::invalid_argument("run_comparison: empty ROI mask");
    const bool budget_mode = setup.budget > 0;
    if (budget_mode && setup.budget < 4)
        throw std::invalid_argument("run_comparison: budget must be >= 4 measurements");
    if (!budget_mode && (!(setup.sr_uffsi > 0.0) || !(setup.sr_hr > 0.0) || !(setup.sr_lr > 0.0)))
        throw std::invalid_argument("run_comparison: need a budget or three sampling ratios");

    const PixelGrid grid = foveated.grid;
    const std::int64_t m = grid.pixel_count();
    const std::int64_t n_cells = foveated.cell_count;

    int lr_x = setup.lr_x, lr_y = setup.lr_y;
    if (lr_x <= 0 || lr_y <= 0) {
        const double s = std::sqrt(static_cast<double>(n_cells) / static_cast<double>(m));
        lr_x = std::clamp(static_cast<int>(std::lround(grid.x * s)), 1, grid.x);
        lr_y = std::clamp(static_cast<int>(std::lround(grid.y * s)), 1, grid.y);
    }
    const std::int64_t m_lr = static_cast<std::int64_t>(lr_x) * lr_y;

    ComparisonReport report;
    report.seed = setup.seed;
    report.config_hash = setup.config_hash;

    std::vector<ArmInput> arms;
    arms.push_back({"uffsi", foveated, scene, n_cells, redundancy_reduction(m, n_cells), false});
    arms.push_back({"fsi_hr", build_identity_layout(grid), scene, m, 0.0, false});
    {
        Scene lr_scene;
        lr_scene.image = box_downsample(scene.image, lr_x, lr_y);
        lr_scene.id = scene.id + " (box-downsampled)";
        arms.push_back({"fsi_lr", build_identity_layout(PixelGrid{lr_x, lr_y}), std::move(lr_scene),
                        m_lr, redundancy_reduction(m, std::min(m, m_lr)), true});
    }

    const double arm_srs[3] = {setup.sr_uffsi, setup.sr_hr, setup.sr_lr};
    for (size_t ai = 0; ai < arms.size(); ++ai) {
        ArmInput& arm = arms[ai];
        const LatticeShape shape = lattice_shape(arm.layout);
        const std::int64_t classes = shape.conjugate_classes();
        bool clamped = false;
        FrequencyPlan plan;
        if (budget_mode) {
            std::int64_t want = std::max<std::int64_t>(setup.budget / 4, 1);
            if (want > classes) {
                clamped = true;
                want = classes;
                report.warnings.push_back(arm.name +
                                          ": budget exceeds full sampling, clamped to " +
                                          std::to_string(4 * classes) + " measurements");
            }
            plan = plan_with_count(shape, want);
        } else {
            plan = plan_for_shape(shape, arm_srs[ai]);
        }

        NoiseConfig noise = setup.noise;
        noise.seed = setup.noise.seed + ai;  // decorrelate arms
        const WeightVector weights = compute_weights(arm.layout);
        const MeasurementSet ms =
            run_acquisition(arm.scene, arm.layout, weights, plan, setup.pattern, noise,
                            setup.threads);
        const Spectrum spectrum = assemble_spectrum(ms, plan, setup.pattern);
        Image recon = reconstruct(spectrum, arm.layout);
        if (arm.upsample) recon = replicate_upsample(recon, grid.x, grid.y);

        ComparisonArm out;
        out.name = arm.name;
        out.data_count = arm.data_count;
        out.lattice_points = shape.points();
        out.sr = plan.sr;
        out.n_freq = plan.n_freq();
        out.n_measurements = plan.n_measurements();
        out.roi_psnr_db = psnr(recon, scene.image, roi);
        out.roi_ssim = ssim(recon, scene.image, roi);
        out.global_psnr_db = psnr(recon, scene.image, roi_full(grid));
        out.redundancy = arm.redundancy;
        out.clamped = clamped;
        out.reconstruction = std::move(recon);
        report.arms.push_back(std::move(out));
    }

    std::int64_t lo = report.arms[0].n_measurements, hi = lo;
    for (const auto& a : report.arms) {
        lo = std::min(lo, a.n_measurements);
        hi = std::max(hi, a.n_measurements);
    }
    if (hi > 0 && static_cast<double>(hi - lo) / static_cast<double>(hi) > 0.005)
        report.warnings.push_back("arm budgets differ by more than 0.5%");
    return report;
}

}  // namespace uffsi
