#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uffsi/metrics.hpp"

namespace uffsi {

struct ComparisonArm {
    std::string name;              // "uffsi" | "fsi_hr" | "fsi_lr"
    std::int64_t data_count = 0;   // non-empty cells (uffsi) or pixels (fsi arms)
    std::int64_t lattice_points = 0;
    double sr = 0.0;
    std::int64_t n_freq = 0;
    std::int64_t n_measurements = 0;
    double roi_psnr_db = 0.0;
    double roi_ssim = 0.0;
    double global_psnr_db = 0.0;
    double redundancy = 0.0;
    bool clamped = false;
    Image reconstruction;
};

struct ComparisonReport {
    std::vector<ComparisonArm> arms;
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
    std::vector<std::string> warnings;
};

// Budgeting: either one matched measurement budget for all arms, or per-arm
// sampling ratios (the published large-scale comparisons quote the latter).
struct ComparisonSetup {
    std::int64_t budget = 0;  // n_measurements; used when > 0
    double sr_uffsi = 0.0;    // used when budget == 0
    double sr_hr = 0.0;
    double sr_lr = 0.0;
    int lr_x = 0;  // reduced-resolution arm dims; 0 = derive from sqrt(N/M)
    int lr_y = 0;
    PatternSpec pattern;
    NoiseConfig noise;
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
    int threads = 0;
};

// Runs three arms at (near-)matched budget: UFFSI on the foveated layout,
// uniform HR FSI on the full grid, and uniform FSI at reduced resolution
// (scene box-downsampled, reconstruction replicated back up for metrics).
ComparisonReport run_comparison(const Scene& scene, const RoiMask& roi,
                                const CellLayout& foveated, const ComparisonSetup& setup);

// Partition-based box average to lr_w x lr_h and its replication inverse.
Image box_downsample(const Image& img, int lr_w, int lr_h);
Image replicate_upsample(const Image& lr, int w, int h);

}  // namespace uffsi
