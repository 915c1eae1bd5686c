#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "uffsi/layout.hpp"

namespace uffsi {

// 4-step phase shift sequence.
inline constexpr std::array<double, 4> kPhases = {
    0.0, std::numbers::pi / 2.0, std::numbers::pi, 3.0 * std::numbers::pi / 2.0};

// Pattern intensity model: a + b * cos(arg + phase), values in [a-b, a+b].
struct PatternSpec {
    double a = 0.5;
    double b = 0.5;
};
void validate(const PatternSpec& spec);

// Signed frequency index; the canonical representative of its conjugate
// class. kv is always 0 on 1D lattices.
struct FreqIndex {
    int ku = 0;
    int kv = 0;
    bool operator==(const FreqIndex&) const = default;
};

struct LatticeShape {
    bool two_d = false;
    std::int64_t n = 0;  // 1D length
    int u = 0;           // 2D extents
    int v = 0;

    std::int64_t points() const { return two_d ? static_cast<std::int64_t>(u) * v : n; }
    // Number of conjugate classes {f, -f} of the index group; self-conjugate
    // frequencies (DC, Nyquist rows/columns) count once.
    std::int64_t conjugate_classes() const;
    bool operator==(const LatticeShape&) const = default;
};

LatticeShape lattice_shape(const CellLayout& layout);

// Ordered frequency subset: one representative per conjugate class, sorted by
// ascending normalized magnitude with a deterministic tie-break, DC first.
struct FrequencyPlan {
    LatticeShape shape;
    double sr = 0.0;  // n_freq / conjugate_classes
    std::vector<FreqIndex> freqs;

    std::int64_t n_freq() const { return static_cast<std::int64_t>(freqs.size()); }
    std::int64_t n_measurements() const { return 4 * n_freq(); }
};

FrequencyPlan make_frequency_plan(const CellLayout& layout, double sr);
FrequencyPlan plan_for_shape(const LatticeShape& shape, double sr);
// Plan by frequency count; counts above the class total clamp to full sampling.
FrequencyPlan plan_with_count(const LatticeShape& shape, std::int64_t n_freq);

// Lattice-valued FSI pattern a + b cos(2 pi f . n + phase). Empty lattice
// cells get value 0.
std::vector<double> synthesize_fsi_pattern(const CellLayout& layout, FreqIndex freq,
                                           double phase, const PatternSpec& spec);

// Pixel-space foveated pattern: w(n(m)) * P_FSI(n(m), f, phase).
Image synthesize_uffsi_pattern(const CellLayout& layout, const WeightVector& weights,
                               FreqIndex freq, double phase, const PatternSpec& spec);

// Complex Fourier coefficients on the lattice, conjugate-symmetric.
struct Spectrum {
    LatticeShape shape;
    std::vector<std::complex<double>> coeffs;  // size shape.points()
    std::vector<std::uint8_t> measured;        // per lattice point
};

struct MeasurementSet;

// C(f) = [(S_0 - S_pi) + j (S_pi/2 - S_3pi/2)] / (2 b); the 1/(2b) factor
// makes the coefficient equal the unnormalized forward DFT of the
// cell-averaged signal. Conjugate entries are filled by symmetry, the rest
// stay zero with measured = false.
Spectrum assemble_spectrum(const MeasurementSet& measurements, const FrequencyPlan& plan,
                           const PatternSpec& spec);

// Inverse DFT with 1 / points() normalization (forward is unnormalized).
std::vector<std::complex<double>> inverse_dft(const Spectrum& spectrum);

// Real part of the inverse DFT expanded back to pixels.
Image reconstruct(const Spectrum& spectrum, const CellLayout& layout);

// Index helpers on the lattice group.
std::int64_t lattice_index(const LatticeShape& shape, FreqIndex f);
FreqIndex conjugate_index(const LatticeShape& shape, FreqIndex f);
bool self_conjugate(const LatticeShape& shape, FreqIndex f);

}  // namespace uffsi
