#include "uffsi/sensing.hpp"

#include <cmath>
#include <stdexcept>

#include "uffsi/parallel.hpp"

namespace uffsi {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Neumaier-compensated accumulator: deterministic for a fixed visit order and
// accurate enough for the 1e-12 relative identities the pipeline promises.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double term) {
        const double t = sum + term;
        if (std::abs(sum) >= std::abs(term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Per-cell w * cos(theta_n) and w * sin(theta_n) tables for one frequency.
// 2D lattices use the separable row/column factorization.
void fill_cell_tables(const LatticeShape& shape, const WeightVector& weights, FreqIndex freq,
                      std::vector<double>& wc, std::vector<double>& ws) {
    const std::int64_t pts = shape.points();
    wc.resize(static_cast<size_t>(pts));
    ws.resize(static_cast<size_t>(pts));
    if (!shape.two_d) {
        for (std::int64_t n = 0; n < pts; ++n) {
            const double arg =
                kTwoPi * (static_cast<double>(freq.ku) * static_cast<double>(n) / shape.n);
            const double w = weights.w[static_cast<size_t>(n)];
            wc[static_cast<size_t>(n)] = w * std::cos(arg);
            ws[static_cast<size_t>(n)] = w * std::sin(arg);
        }
        return;
    }
    std::vector<double> cu(static_cast<size_t>(shape.u)), su(static_cast<size_t>(shape.u));
    std::vector<double> cv(static_cast<size_t>(shape.v)), sv(static_cast<size_t>(shape.v));
    for (int u = 0; u < shape.u; ++u) {
        const double arg = kTwoPi * (static_cast<double>(freq.ku) * u / shape.u);
        cu[static_cast<size_t>(u)] = std::cos(arg);
        su[static_cast<size_t>(u)] = std::sin(arg);
    }
    for (int v = 0; v < shape.v; ++v) {
        const double arg = kTwoPi * (static_cast<double>(freq.kv) * v / shape.v);
        cv[static_cast<size_t>(v)] = std::cos(arg);
        sv[static_cast<size_t>(v)] = std::sin(arg);
    }
    std::int64_t n = 0;
    for (int v = 0; v < shape.v; ++v) {
        const double cvv = cv[static_cast<size_t>(v)];
        const double svv = sv[static_cast<size_t>(v)];
        for (int u = 0; u < shape.u; ++u, ++n) {
            const double w = weights.w[static_cast<size_t>(n)];
            wc[static_cast<size_t>(n)] = w * (cu[static_cast<size_t>(u)] * cvv -
                                              su[static_cast<size_t>(u)] * svv);
            ws[static_cast<size_t>(n)] = w * (su[static_cast<size_t>(u)] * cvv +
                                              cu[static_cast<size_t>(u)] * svv);
        }
    }
}

}  // namespace

double measure(const Image& scene, const Image& pattern) {
    if (!scene.same_shape(pattern))
        throw std::invalid_argument("measure: scene and pattern dimensions differ");
    CompensatedSum acc;
    const size_t m = scene.data.size();
    for (size_t i = 0; i < m; ++i) acc.add(scene.data[i] * pattern.data[i]);
    return acc.value();
}

double gaussian_draw(std::uint64_t seed, std::uint64_t counter) {
    const std::uint64_t s = mix64(seed + 0x9E3779B97F4A7C15ull * (counter + 1));
    const std::uint64_t a = mix64(s + 0x9E3779B97F4A7C15ull);
    const std::uint64_t b = mix64(s + 0x3C6EF372FE94F82Aull);
    const double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;          // [0, 1)
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

MeasurementSet run_acquisition(const Scene& scene, const CellLayout& layout,
                               const WeightVector& weights, const FrequencyPlan& plan,
                               const PatternSpec& spec, const NoiseConfig& noise, int threads) {
    validate(spec);
    if (scene.image.width != layout.grid.x || scene.image.height != layout.grid.y)
        throw std::invalid_argument("run_acquisition: scene dimensions do not match layout");
    if (static_cast<std::int64_t>(weights.w.size()) != layout.lattice_size())
        throw std::invalid_argument("run_acquisition: weights do not match layout");
    if (!(plan.shape == lattice_shape(layout)))
        throw std::invalid_argument("run_acquisition: plan lattice does not match layout");
    if (noise.kind == NoiseConfig::Kind::Gaussian && !(noise.sigma_rel >= 0.0))
        throw std::invalid_argument("run_acquisition: noise sigma must be >= 0");

    const std::int64_t m = layout.grid.pixel_count();
    const std::int64_t n_freq = plan.n_freq();
    const double* o = scene.image.data.data();
    const std::uint32_t* p2c = layout.pixel_to_cell.data();

    // DC component of every reading: a * sum_m w(n(m)) O(m).
    CompensatedSum g_acc;
    for (std::int64_t i = 0; i < m; ++i)
        g_acc.add(weights.w[p2c[static_cast<size_t>(i)]] * o[static_cast<size_t>(i)]);
    const double dc_term = spec.a * g_acc.value();

    MeasurementSet ms;
    ms.plan = plan;
    ms.noise = noise;
    ms.readings.assign(static_cast<size_t>(4 * n_freq), 0.0);

    // One pixel pass per frequency; readings for each frequency differ only
    // in the phase combination, so all four phases share the pass. Each
    // frequency writes its own four slots, keeping the result independent of
    // the parallel schedule.
    auto acquire_range = [&](std::int64_t begin, std::int64_t end) {
        std::vector<double> wc, ws;
        for (std::int64_t fi = begin; fi < end; ++fi) {
            const FreqIndex f = plan.freqs[static_cast<size_t>(fi)];
            fill_cell_tables(plan.shape, weights, f, wc, ws);
            CompensatedSum dot_cos, dot_sin;
            for (std::int64_t i = 0; i < m; ++i) {
                const std::uint32_t n = p2c[static_cast<size_t>(i)];
                const double oi = o[static_cast<size_t>(i)];
                dot_cos.add(wc[n] * oi);
                dot_sin.add(ws[n] * oi);
            }
            const double bc = spec.b * dot_cos.value();
            const double bs = spec.b * dot_sin.value();
            ms.readings[static_cast<size_t>(4 * fi) + 0] = dc_term + bc;
            ms.readings[static_cast<size_t>(4 * fi) + 1] = dc_term - bs;
            ms.readings[static_cast<size_t>(4 * fi) + 2] = dc_term - bc;
            ms.readings[static_cast<size_t>(4 * fi) + 3] = dc_term + bs;
        }
    };
    parallel_for(n_freq, threads, acquire_range);

    if (noise.kind == NoiseConfig::Kind::Gaussian && noise.sigma_rel > 0.0) {
        // Sigma is relative to the mean of the four noiseless DC readings;
        // the plan puts DC first.
        double dc_mean = 0.0;
        for (int p = 0; p < 4; ++p) dc_mean += ms.readings[static_cast<size_t>(p)];
        dc_mean *= 0.25;
        const double sigma = noise.sigma_rel * std::abs(dc_mean);
        if (sigma > 0.0) {
            parallel_for(4 * n_freq, threads, [&](std::int64_t begin, std::int64_t end) {
                for (std::int64_t slot = begin; slot < end; ++slot)
                    ms.readings[static_cast<size_t>(slot)] +=
                        sigma * gaussian_draw(noise.seed, static_cast<std::uint64_t>(slot));
            });
        }
    }
    return ms;
}

}  // namespace uffsi
