#include "uffsi/fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include "uffsi/sensing.hpp"

namespace uffsi {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Signed index range of a length-n axis is (-n/2, n/2].
bool in_signed_range(int k, std::int64_t n) {
    return 2 * static_cast<std::int64_t>(k) > -n && 2 * static_cast<std::int64_t>(k) <= n;
}

int wrap_negate(int k, std::int64_t n) {
    int r = -k;
    if (n % 2 == 0 && r == -static_cast<int>(n / 2)) r = static_cast<int>(n / 2);
    return r;
}

std::int64_t floor_mod(std::int64_t k, std::int64_t n) {
    std::int64_t r = k % n;
    return r < 0 ? r + n : r;
}

struct PlanEntry {
    std::int64_t mag2;  // squared magnitude of (ku/U, kv/V), scaled to an integer
    int ku;
    int kv;
};

// All canonical conjugate-class representatives, sorted by ascending
// magnitude with (ku, kv) as the deterministic tie-break. DC comes first.
std::vector<PlanEntry> sorted_representatives(const LatticeShape& shape) {
    std::vector<PlanEntry> entries;
    if (shape.two_d) {
        const std::int64_t uu = shape.u;
        const std::int64_t vv = shape.v;
        entries.reserve(static_cast<size_t>(shape.conjugate_classes()));
        const int ku_lo = static_cast<int>(-(uu - 1) / 2);
        const int ku_hi = static_cast<int>(uu / 2);
        const int kv_lo = static_cast<int>(-(vv - 1) / 2);
        const int kv_hi = static_cast<int>(vv / 2);
        for (int kv = kv_lo; kv <= kv_hi; ++kv) {
            for (int ku = ku_lo; ku <= ku_hi; ++ku) {
                const FreqIndex f{ku, kv};
                const FreqIndex c = conjugate_index(shape, f);
                if (f.ku < c.ku || (f.ku == c.ku && f.kv < c.kv)) continue;
                entries.push_back({ku * static_cast<std::int64_t>(ku) * vv * vv +
                                       kv * static_cast<std::int64_t>(kv) * uu * uu,
                                   ku, kv});
            }
        }
    } else {
        const std::int64_t n = shape.n;
        const int k_hi = static_cast<int>(n / 2);
        entries.reserve(static_cast<size_t>(k_hi) + 1);
        for (int k = 0; k <= k_hi; ++k)
            entries.push_back({static_cast<std::int64_t>(k) * k, k, 0});
    }
    std::sort(entries.begin(), entries.end(), [](const PlanEntry& a, const PlanEntry& b) {
        if (a.mag2 != b.mag2) return a.mag2 < b.mag2;
        if (a.ku != b.ku) return a.ku < b.ku;
        return a.kv < b.kv;
    });
    return entries;
}

FrequencyPlan plan_take(const LatticeShape& shape, std::int64_t count) {
    const std::int64_t classes = shape.conjugate_classes();
    count = std::clamp<std::int64_t>(count, 1, classes);
    auto entries = sorted_representatives(shape);
    FrequencyPlan plan;
    plan.shape = shape;
    plan.sr = static_cast<double>(count) / static_cast<double>(classes);
    plan.freqs.reserve(static_cast<size_t>(count));
    for (std::int64_t i = 0; i < count; ++i)
        plan.freqs.push_back({entries[static_cast<size_t>(i)].ku, entries[static_cast<size_t>(i)].kv});
    return plan;
}

std::mutex g_fftw_planner_mutex;

}  // namespace

void validate(const PatternSpec& spec) {
    if (!(spec.a >= 0.0) || !(spec.b > 0.0) || !(spec.a + spec.b <= 1.0) ||
        !(spec.a - spec.b >= 0.0))
        throw std::invalid_argument("pattern spec: need a >= b > 0 and a + b <= 1");
}

std::int64_t LatticeShape::conjugate_classes() const {
    const std::int64_t pts = points();
    std::int64_t self = 1;
    if (two_d) {
        self = (u % 2 == 0 ? 2 : 1) * (v % 2 == 0 ? 2 : 1);
    } else {
        self = (n % 2 == 0) ? 2 : 1;
    }
    return (pts + self) / 2;
}

LatticeShape lattice_shape(const CellLayout& layout) {
    LatticeShape shape;
    if (const auto* l1 = std::get_if<Lattice1D>(&layout.lattice)) {
        shape.two_d = false;
        shape.n = l1->length;
    } else {
        const auto& l2 = std::get<Lattice2D>(layout.lattice);
        shape.two_d = true;
        shape.u = l2.u_count;
        shape.v = l2.v_count;
    }
    return shape;
}

std::int64_t lattice_index(const LatticeShape& shape, FreqIndex f) {
    if (shape.two_d)
        return floor_mod(f.kv, shape.v) * shape.u + floor_mod(f.ku, shape.u);
    return floor_mod(f.ku, shape.n);
}

FreqIndex conjugate_index(const LatticeShape& shape, FreqIndex f) {
    if (shape.two_d) return {wrap_negate(f.ku, shape.u), wrap_negate(f.kv, shape.v)};
    return {wrap_negate(f.ku, shape.n), 0};
}

bool self_conjugate(const LatticeShape& shape, FreqIndex f) {
    const FreqIndex c = conjugate_index(shape, f);
    return c.ku == f.ku && c.kv == f.kv;
}

FrequencyPlan plan_for_shape(const LatticeShape& shape, double sr) {
    if (!(sr > 0.0) || !(sr <= 1.0))
        throw std::invalid_argument("frequency plan: sampling ratio must lie in (0, 1]");
    const auto count =
        static_cast<std::int64_t>(std::floor(sr * static_cast<double>(shape.conjugate_classes())));
    FrequencyPlan plan = plan_take(shape, count);
    plan.sr = sr;
    return plan;
}

FrequencyPlan make_frequency_plan(const CellLayout& layout, double sr) {
    return plan_for_shape(lattice_shape(layout), sr);
}

FrequencyPlan plan_with_count(const LatticeShape& shape, std::int64_t n_freq) {
    return plan_take(shape, n_freq);
}

std::vector<double> synthesize_fsi_pattern(const CellLayout& layout, FreqIndex freq, double phase,
                                           const PatternSpec& spec) {
    validate(spec);
    const LatticeShape shape = lattice_shape(layout);
    if (shape.two_d) {
        if (!in_signed_range(freq.ku, shape.u) || !in_signed_range(freq.kv, shape.v))
            throw std::invalid_argument("frequency outside lattice index range");
    } else {
        if (!in_signed_range(freq.ku, shape.n) || freq.kv != 0)
            throw std::invalid_argument("frequency outside lattice index range");
    }

    const std::int64_t pts = shape.points();
    std::vector<double> pattern(static_cast<size_t>(pts), 0.0);
    if (shape.two_d) {
        const auto& l2 = std::get<Lattice2D>(layout.lattice);
        std::int64_t n = 0;
        for (int v = 0; v < shape.v; ++v) {
            for (int u = 0; u < shape.u; ++u, ++n) {
                if (l2.empty[static_cast<size_t>(n)]) continue;  // empty cells carry no pattern
                const double arg = kTwoPi * (static_cast<double>(freq.ku) * u / shape.u +
                                             static_cast<double>(freq.kv) * v / shape.v);
                pattern[static_cast<size_t>(n)] = spec.a + spec.b * std::cos(arg + phase);
            }
        }
    } else {
        for (std::int64_t n = 0; n < pts; ++n) {
            const double arg =
                kTwoPi * (static_cast<double>(freq.ku) * static_cast<double>(n) / shape.n);
            pattern[static_cast<size_t>(n)] = spec.a + spec.b * std::cos(arg + phase);
        }
    }
    return pattern;
}

Image synthesize_uffsi_pattern(const CellLayout& layout, const WeightVector& weights,
                               FreqIndex freq, double phase, const PatternSpec& spec) {
    if (static_cast<std::int64_t>(weights.w.size()) != layout.lattice_size())
        throw std::invalid_argument("uffsi pattern: weights do not match layout");
    const std::vector<double> lattice_pattern = synthesize_fsi_pattern(layout, freq, phase, spec);
    Image out(layout.grid.x, layout.grid.y);
    const std::int64_t m = layout.grid.pixel_count();
    for (std::int64_t i = 0; i < m; ++i) {
        const std::uint32_t n = layout.pixel_to_cell[static_cast<size_t>(i)];
        out.data[static_cast<size_t>(i)] = weights.w[n] * lattice_pattern[n];
    }
    return out;
}

Spectrum assemble_spectrum(const MeasurementSet& measurements, const FrequencyPlan& plan,
                           const PatternSpec& spec) {
    validate(spec);
    if (measurements.readings.size() != static_cast<size_t>(4 * plan.n_freq()))
        throw std::invalid_argument("assemble_spectrum: incomplete measurement set");

    Spectrum spectrum;
    spectrum.shape = plan.shape;
    spectrum.coeffs.assign(static_cast<size_t>(plan.shape.points()), {0.0, 0.0});
    spectrum.measured.assign(static_cast<size_t>(plan.shape.points()), 0);

    const double inv2b = 1.0 / (2.0 * spec.b);
    for (std::int64_t i = 0; i < plan.n_freq(); ++i) {
        const FreqIndex f = plan.freqs[static_cast<size_t>(i)];
        const double re = (measurements.reading(i, 0) - measurements.reading(i, 2)) * inv2b;
        const double im = (measurements.reading(i, 1) - measurements.reading(i, 3)) * inv2b;
        const std::int64_t idx = lattice_index(plan.shape, f);
        if (self_conjugate(plan.shape, f)) {
            // Analytically real; drop the numerical residue so conjugate
            // symmetry holds exactly.
            spectrum.coeffs[static_cast<size_t>(idx)] = {re, 0.0};
            spectrum.measured[static_cast<size_t>(idx)] = 1;
        } else {
            const std::int64_t cidx = lattice_index(plan.shape, conjugate_index(plan.shape, f));
            spectrum.coeffs[static_cast<size_t>(idx)] = {re, im};
            spectrum.coeffs[static_cast<size_t>(cidx)] = {re, -im};
            spectrum.measured[static_cast<size_t>(idx)] = 1;
            spectrum.measured[static_cast<size_t>(cidx)] = 1;
        }
    }
    return spectrum;
}

std::vector<std::complex<double>> inverse_dft(const Spectrum& spectrum) {
    const std::int64_t pts = spectrum.shape.points();
    if (static_cast<std::int64_t>(spectrum.coeffs.size()) != pts)
        throw std::invalid_argument("inverse_dft: coefficient array does not match lattice");

    std::vector<std::complex<double>> in = spectrum.coeffs;
    std::vector<std::complex<double>> out(static_cast<size_t>(pts));
    fftw_plan plan = nullptr;
    {
        std::lock_guard<std::mutex> lock(g_fftw_planner_mutex);
        if (spectrum.shape.two_d) {
            plan = fftw_plan_dft_2d(spectrum.shape.v, spectrum.shape.u,
                                    reinterpret_cast<fftw_complex*>(in.data()),
                                    reinterpret_cast<fftw_complex*>(out.data()), FFTW_BACKWARD,
                                    FFTW_ESTIMATE);
        } else {
            plan = fftw_plan_dft_1d(static_cast<int>(spectrum.shape.n),
                                    reinterpret_cast<fftw_complex*>(in.data()),
                                    reinterpret_cast<fftw_complex*>(out.data()), FFTW_BACKWARD,
                                    FFTW_ESTIMATE);
        }
    }
    if (plan == nullptr) throw numeric_error("inverse_dft: FFTW plan creation failed");
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(g_fftw_planner_mutex);
        fftw_destroy_plan(plan);
    }
    const double scale = 1.0 / static_cast<double>(pts);
    for (auto& c : out) c *= scale;
    return out;
}

Image reconstruct(const Spectrum& spectrum, const CellLayout& layout) {
    if (!(spectrum.shape == lattice_shape(layout)))
        throw std::invalid_argument("reconstruct: spectrum lattice does not match layout");
    const auto field = inverse_dft(spectrum);
    std::vector<double> values(field.size());
    for (size_t i = 0; i < field.size(); ++i) values[i] = field[i].real();
    return expand_to_pixels(values, layout);
}

}  // namespace uffsi
