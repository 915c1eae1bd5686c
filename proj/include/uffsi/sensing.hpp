#pragma once

#include <cstdint>
#include <string>

#include "uffsi/fourier.hpp"

namespace uffsi {

struct Scene {
    Image image;
    std::string id;
};

struct NoiseConfig {
    enum class Kind { None, Gaussian };
    Kind kind = Kind::None;
    // Gaussian sigma, relative to the mean of the four noiseless DC-phase
    // readings. Draws come from a counter RNG keyed by (seed, frequency,
    // phase), so results do not depend on the parallel schedule.
    double sigma_rel = 0.0;
    std::uint64_t seed = 0;
};

// Inner product over all M pixels in fixed raster order (compensated
// summation, deterministic).
double measure(const Image& scene, const Image& pattern);

// Detector readings, slot = 4 * frequency_index + phase_index.
struct MeasurementSet {
    FrequencyPlan plan;
    NoiseConfig noise;
    std::vector<double> readings;

    double reading(std::int64_t freq_index, int phase_index) const {
        return readings[static_cast<size_t>(4 * freq_index + phase_index)];
    }
};

// 4-step phase-shift acquisition: one reading per planned frequency and
// phase. Noiseless runs and fixed-seed runs are byte-reproducible across
// thread counts.
MeasurementSet run_acquisition(const Scene& scene, const CellLayout& layout,
                               const WeightVector& weights, const FrequencyPlan& plan,
                               const PatternSpec& spec, const NoiseConfig& noise = {},
                               int threads = 0);

// Standard-normal draw from a counter RNG; pure in (seed, counter).
double gaussian_draw(std::uint64_t seed, std::uint64_t counter);

}  // namespace uffsi
