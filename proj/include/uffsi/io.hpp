#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "uffsi/compare.hpp"
#include "uffsi/fourier.hpp"
#include "uffsi/layout.hpp"
#include "uffsi/metrics.hpp"
#include "uffsi/sensing.hpp"

namespace uffsi {

// ---- images ------------------------------------------------------------
// Grayscale 8/16-bit PGM (P5) and PNG. Values are mapped to [0, 1] by
// dividing by the max representable value; writers quantize with rounding.

Image read_image(const std::filesystem::path& path);  // dispatches on extension
Image read_pgm(const std::filesystem::path& path);
Image read_png_gray(const std::filesystem::path& path);
void write_pgm8(const std::filesystem::path& path, const Image& img);
void write_png_gray8(const std::filesystem::path& path, const Image& img);

// Min-max normalization for display exports only; metrics always run on the
// unnormalized data.
Image normalize_for_display(const Image& img);

// ---- layout container ---------------------------------------------------
// Binary container: magic, version, X, Y, N, lattice descriptor,
// pixel_to_cell as little-endian u32, weights as little-endian f64.

void save_layout(const std::filesystem::path& path, const CellLayout& layout,
                 const WeightVector& weights);
void load_layout(const std::filesystem::path& path, CellLayout& layout, WeightVector& weights);

// Human-readable summary (counts per kind, redundancy).
std::string layout_summary(const CellLayout& layout);

// False-color cell map for visual inspection (distinct gray per cell).
void write_cell_map_pgm(const std::filesystem::path& path, const CellLayout& layout);

// ---- measurement sets ----------------------------------------------------
// CSV columns: ku,kv,phase,reading (phase = step index 0..3, readings with
// full round-trip precision) and a binary twin. Both round-trip losslessly.

void save_measurements_csv(const std::filesystem::path& path, const MeasurementSet& ms);
MeasurementSet load_measurements_csv(const std::filesystem::path& path);
void save_measurements_bin(const std::filesystem::path& path, const MeasurementSet& ms);
MeasurementSet load_measurements_bin(const std::filesystem::path& path);

// ---- spectra and plans -----------------------------------------------------

void save_spectrum(const std::filesystem::path& path, const Spectrum& spectrum);
Spectrum load_spectrum(const std::filesystem::path& path);

// CSV columns: index,ku,kv,magnitude.
void save_plan_csv(const std::filesystem::path& path, const FrequencyPlan& plan);

// ---- comparison reports ----------------------------------------------------

void save_report_csv(const std::filesystem::path& path, const ComparisonReport& report);
std::string report_pretty(const ComparisonReport& report);

// Deterministic 64-bit content hash (FNV-1a).
std::uint64_t fnv1a64(const void* data, size_t size);
std::uint64_t fnv1a64(const std::string& s);

}  // namespace uffsi
