#include "uffsi/io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace uffsi {

namespace {

// ---- little-endian binary primitives ----

void put_bytes(std::ostream& os, const void* p, size_t n) {
    os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

template <typename T>
void put_le(std::ostream& os, T v) {
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));  // host is little-endian; kept explicit for the format
    put_bytes(os, buf, sizeof(T));
}

void put_f64(std::ostream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_le(os, bits);
}

void get_bytes(std::istream& is, void* p, size_t n) {
    is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!is) throw io_error("unexpected end of file");
}

template <typename T>
T get_le(std::istream& is) {
    unsigned char buf[sizeof(T)];
    get_bytes(is, buf, sizeof(T));
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
}

double get_f64(std::istream& is) {
    const std::uint64_t bits = get_le<std::uint64_t>(is);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

std::ofstream open_out(const std::filesystem::path& path, bool binary = true) {
    std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
    if (!os) throw io_error("cannot open for writing: " + path.string());
    return os;
}

std::ifstream open_in(const std::filesystem::path& path, bool binary = true) {
    std::ifstream is(path, binary ? std::ios::binary : std::ios::in);
    if (!is) throw io_error("cannot open for reading: " + path.string());
    return is;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

int pgm_next_token(std::istream& is, std::string& tok) {
    tok.clear();
    int c = is.get();
    while (c != EOF) {
        if (c == '#') {  // comment to end of line
            while (c != EOF && c != '\n') c = is.get();
            c = is.get();
            continue;
        }
        if (!std::isspace(c)) break;
        c = is.get();
    }
    while (c != EOF && !std::isspace(c) && c != '#') {
        tok.push_back(static_cast<char>(c));
        c = is.get();
    }
    return tok.empty() ? EOF : 0;
}

std::uint8_t quantize8(double v) {
    const double q = std::lround(std::clamp(v, 0.0, 1.0) * 255.0);
    return static_cast<std::uint8_t>(q);
}

}  // namespace

std::uint64_t fnv1a64(const void* data, size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

// ---- PGM ------------------------------------------------------------------

void write_pgm8(const std::filesystem::path& path, const Image& img) {
    auto os = open_out(path);
    os << "P5\n" << img.width << " " << img.height << "\n255\n";
    std::vector<std::uint8_t> row(static_cast<size_t>(img.width));
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) row[static_cast<size_t>(x)] = quantize8(img.at(x, y));
        put_bytes(os, row.data(), row.size());
    }
    if (!os) throw io_error("write failed: " + path.string());
}

Image read_pgm(const std::filesystem::path& path) {
    auto is = open_in(path);
    std::string tok;
    if (pgm_next_token(is, tok) == EOF || tok != "P5")
        throw io_error("not a binary PGM (P5): " + path.string());
    long w = 0, h = 0, maxval = 0;
    try {
        if (pgm_next_token(is, tok) == EOF) throw io_error("truncated PGM header");
        w = std::stol(tok);
        if (pgm_next_token(is, tok) == EOF) throw io_error("truncated PGM header");
        h = std::stol(tok);
        if (pgm_next_token(is, tok) == EOF) throw io_error("truncated PGM header");
        maxval = std::stol(tok);
    } catch (const std::logic_error&) {
        throw io_error("malformed PGM header: " + path.string());
    }
    if (w < 1 || h < 1 || maxval < 1 || maxval > 65535)
        throw io_error("unsupported PGM geometry: " + path.string());

    Image img(static_cast<int>(w), static_cast<int>(h));
    const double scale = 1.0 / static_cast<double>(maxval);
    const size_t n = img.data.size();
    if (maxval <= 255) {
        std::vector<std::uint8_t> raw(n);
        get_bytes(is, raw.data(), n);
        for (size_t i = 0; i < n; ++i) img.data[i] = raw[i] * scale;
    } else {
        std::vector<std::uint8_t> raw(2 * n);  // 16-bit samples are big-endian
        get_bytes(is, raw.data(), raw.size());
        for (size_t i = 0; i < n; ++i)
            img.data[i] = (raw[2 * i] * 256 + raw[2 * i + 1]) * scale;
    }
    return img;
}

// ---- PNG (grayscale) --------------------------------------------------------

Image read_png_gray(const std::filesystem::path& path) {
    std::FILE* fp = std::fopen(path.string().c_str(), "rb");
    if (!fp) throw io_error("cannot open for reading: " + path.string());

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw io_error("libpng init failed");
    }
    std::vector<png_bytep> rows;
    std::vector<png_byte> pixels;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw io_error("PNG decode failed: " + path.string());
    }
    png_init_io(png, fp);
    png_read_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);
    if (color != PNG_COLOR_TYPE_GRAY) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw io_error("PNG is not grayscale: " + path.string());
    }
    if (depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    png_read_update_info(png, info);
    const int out_depth = depth > 8 ? 16 : 8;
    const size_t rowbytes = png_get_rowbytes(png, info);

    pixels.resize(rowbytes * h);
    rows.resize(h);
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = pixels.data() + y * rowbytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);

    Image img(static_cast<int>(w), static_cast<int>(h));
    if (out_depth == 8) {
        const double scale = 1.0 / 255.0;
        for (png_uint_32 y = 0; y < h; ++y)
            for (png_uint_32 x = 0; x < w; ++x)
                img.at(static_cast<int>(x), static_cast<int>(y)) = rows[y][x] * scale;
    } else {
        const double scale = 1.0 / 65535.0;
        for (png_uint_32 y = 0; y < h; ++y)
            for (png_uint_32 x = 0; x < w; ++x)
                img.at(static_cast<int>(x), static_cast<int>(y)) =
                    (rows[y][2 * x] * 256 + rows[y][2 * x + 1]) * scale;  // network byte order
    }
    return img;
}

void write_png_gray8(const std::filesystem::path& path, const Image& img) {
    std::FILE* fp = std::fopen(path.string().c_str(), "wb");
    if (!fp) throw io_error("cannot open for writing: " + path.string());

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw io_error("libpng init failed");
    }
    std::vector<std::uint8_t> raw(static_cast<size_t>(img.width) * img.height);
    std::vector<png_bytep> rows(static_cast<size_t>(img.height));
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw io_error("PNG encode failed: " + path.string());
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
                 static_cast<png_uint_32>(img.height), 8, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x)
            raw[static_cast<size_t>(y) * img.width + x] = quantize8(img.at(x, y));
        rows[static_cast<size_t>(y)] = raw.data() + static_cast<size_t>(y) * img.width;
    }
    png_set_rows(png, info, rows.data());
    png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

Image read_image(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext == ".pgm") return read_pgm(path);
    if (ext == ".png") return read_png_gray(path);
    throw io_error("unsupported image format (need .pgm or .png): " + path.string());
}

Image normalize_for_display(const Image& img) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : img.data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    Image out(img.width, img.height);
    if (!(hi > lo)) return out;
    const double scale = 1.0 / (hi - lo);
    for (size_t i = 0; i < img.data.size(); ++i) out.data[i] = (img.data[i] - lo) * scale;
    return out;
}

// ---- layout container --------------------------------------------------------

namespace {
constexpr char kLayoutMagic[8] = {'U', 'F', 'S', 'L', 'A', 'Y', 'T', '1'};
constexpr std::uint32_t kLayoutVersion = 1;
}  // namespace

void save_layout(const std::filesystem::path& path, const CellLayout& layout,
                 const WeightVector& weights) {
    if (static_cast<std::int64_t>(weights.w.size()) != layout.lattice_size())
        throw std::invalid_argument("save_layout: weights do not match layout");
    auto os = open_out(path);
    put_bytes(os, kLayoutMagic, 8);
    put_le(os, kLayoutVersion);
    put_le(os, static_cast<std::uint32_t>(layout.grid.x));
    put_le(os, static_cast<std::uint32_t>(layout.grid.y));
    put_le(os, static_cast<std::uint64_t>(layout.cell_count));
    if (const auto* l1 = std::get_if<Lattice1D>(&layout.lattice)) {
        put_le<std::uint8_t>(os, 0);
        put_le(os, static_cast<std::uint64_t>(l1->length));
    } else {
        const auto& l2 = std::get<Lattice2D>(layout.lattice);
        put_le<std::uint8_t>(os, 1);
        put_le(os, static_cast<std::uint32_t>(l2.u_count));
        put_le(os, static_cast<std::uint32_t>(l2.v_count));
        put_bytes(os, l2.empty.data(), l2.empty.size());
    }
    for (CellKind k : layout.cell_kind) put_le(os, static_cast<std::uint8_t>(k));
    for (std::uint32_t c : layout.pixel_to_cell) put_le(os, c);
    for (double w : weights.w) put_f64(os, w);
    if (!os) throw io_error("write failed: " + path.string());
}

void load_layout(const std::filesystem::path& path, CellLayout& layout, WeightVector& weights) {
    auto is = open_in(path);
    char magic[8];
    get_bytes(is, magic, 8);
    if (std::memcmp(magic, kLayoutMagic, 8) != 0)
        throw io_error("bad layout magic: " + path.string());
    if (get_le<std::uint32_t>(is) != kLayoutVersion)
        throw io_error("unsupported layout version: " + path.string());

    CellLayout out;
    out.grid.x = static_cast<int>(get_le<std::uint32_t>(is));
    out.grid.y = static_cast<int>(get_le<std::uint32_t>(is));
    out.cell_count = static_cast<std::int64_t>(get_le<std::uint64_t>(is));
    const auto type = get_le<std::uint8_t>(is);
    if (type == 0) {
        out.lattice = Lattice1D{static_cast<std::int64_t>(get_le<std::uint64_t>(is))};
    } else if (type == 1) {
        Lattice2D l2;
        l2.u_count = static_cast<int>(get_le<std::uint32_t>(is));
        l2.v_count = static_cast<int>(get_le<std::uint32_t>(is));
        l2.empty.resize(static_cast<size_t>(l2.u_count) * l2.v_count);
        get_bytes(is, l2.empty.data(), l2.empty.size());
        out.lattice = std::move(l2);
    } else {
        throw io_error("bad lattice descriptor: " + path.string());
    }
    const auto cells = static_cast<size_t>(out.lattice_size());
    out.cell_kind.resize(cells);
    for (size_t i = 0; i < cells; ++i) out.cell_kind[i] = static_cast<CellKind>(get_le<std::uint8_t>(is));
    const auto m = static_cast<size_t>(out.grid.pixel_count());
    out.pixel_to_cell.resize(m);
    for (size_t i = 0; i < m; ++i) out.pixel_to_cell[i] = get_le<std::uint32_t>(is);
    WeightVector w;
    w.w.resize(cells);
    for (size_t i = 0; i < cells; ++i) w.w[i] = get_f64(is);

    out.cell_sizes.assign(cells, 0);
    for (std::uint32_t c : out.pixel_to_cell) {
        if (c >= cells) throw io_error("pixel_to_cell out of range: " + path.string());
        out.cell_sizes[c]++;
    }
    layout = std::move(out);
    weights = std::move(w);
}

std::string layout_summary(const CellLayout& layout) {
    const std::int64_t m = layout.grid.pixel_count();
    std::int64_t fovea = 0, periphery = 0, empty = 0;
    for (size_t n = 0; n < layout.cell_sizes.size(); ++n) {
        if (layout.cell_sizes[n] == 0)
            ++empty;
        else if (layout.cell_kind[n] == CellKind::Fovea)
            ++fovea;
        else
            ++periphery;
    }
    std::ostringstream os;
    os << "grid: " << layout.grid.x << " x " << layout.grid.y << " (" << m << " pixels)\n";
    os << "cells: " << layout.cell_count << " (fovea " << fovea << ", periphery " << periphery;
    if (empty > 0) os << ", empty lattice cells " << empty;
    os << ")\n";
    if (const auto* l1 = std::get_if<Lattice1D>(&layout.lattice)) {
        os << "lattice: 1D, length " << l1->length << "\n";
    } else {
        const auto& l2 = std::get<Lattice2D>(layout.lattice);
        os << "lattice: 2D, " << l2.u_count << " x " << l2.v_count << "\n";
    }
    if (const auto* cm = std::get_if<CircularMeta>(&layout.meta)) {
        os << "rings: " << cm->ring_count << " x " << cm->q_sectors << " sectors, cell bound N <= "
           << cm->fovea_cell_count + static_cast<std::int64_t>(cm->ring_count) * cm->q_sectors
           << "\n";
    } else if (const auto* rm = std::get_if<RectMeta>(&layout.meta)) {
        os << "axis centers: " << rm->x_centers.size() << " x " << rm->y_centers.size();
        if (rm->theta != 0.0) os << ", theta " << rm->theta;
        os << "\n";
    }
    os << "redundancy reduction: " << fmt_double(redundancy_reduction(m, layout.cell_count))
       << "\n";
    return os.str();
}

void write_cell_map_pgm(const std::filesystem::path& path, const CellLayout& layout) {
    auto os = open_out(path);
    os << "P5\n" << layout.grid.x << " " << layout.grid.y << "\n255\n";
    std::vector<std::uint8_t> row(static_cast<size_t>(layout.grid.x));
    std::int64_t i = 0;
    for (int y = 0; y < layout.grid.y; ++y) {
        for (int x = 0; x < layout.grid.x; ++x, ++i) {
            const std::uint32_t cell = layout.pixel_to_cell[static_cast<size_t>(i)];
            row[static_cast<size_t>(x)] =
                static_cast<std::uint8_t>((cell * 2654435761u >> 16) & 0xFF);
        }
        put_bytes(os, row.data(), row.size());
    }
    if (!os) throw io_error("write failed: " + path.string());
}

// ---- measurement sets ----------------------------------------------------------

namespace {
constexpr char kMeasMagic[8] = {'U', 'F', 'S', 'M', 'E', 'A', 'S', '1'};

void put_shape(std::ostream& os, const LatticeShape& shape) {
    put_le<std::uint8_t>(os, shape.two_d ? 1 : 0);
    put_le(os, static_cast<std::uint64_t>(shape.n));
    put_le(os, static_cast<std::uint32_t>(shape.u));
    put_le(os, static_cast<std::uint32_t>(shape.v));
}

LatticeShape get_shape(std::istream& is) {
    LatticeShape shape;
    shape.two_d = get_le<std::uint8_t>(is) != 0;
    shape.n = static_cast<std::int64_t>(get_le<std::uint64_t>(is));
    shape.u = static_cast<int>(get_le<std::uint32_t>(is));
    shape.v = static_cast<int>(get_le<std::uint32_t>(is));
    return shape;
}

std::string shape_comment(const LatticeShape& shape) {
    std::ostringstream os;
    if (shape.two_d)
        os << "lattice=2d u=" << shape.u << " v=" << shape.v;
    else
        os << "lattice=1d n=" << shape.n;
    return os.str();
}
}  // namespace

void save_measurements_csv(const std::filesystem::path& path, const MeasurementSet& ms) {
    auto os = open_out(path, false);
    os << "# uffsi-measurements v1\n";
    os << "# " << shape_comment(ms.plan.shape) << " sr=" << fmt_double(ms.plan.sr) << "\n";
    os << "# noise=" << (ms.noise.kind == NoiseConfig::Kind::Gaussian ? "gaussian" : "none")
       << " sigma_rel=" << fmt_double(ms.noise.sigma_rel) << " seed=" << ms.noise.seed << "\n";
    os << "ku,kv,phase,reading\n";
    for (std::int64_t fi = 0; fi < ms.plan.n_freq(); ++fi) {
        const FreqIndex f = ms.plan.freqs[static_cast<size_t>(fi)];
        for (int p = 0; p < 4; ++p)
            os << f.ku << "," << f.kv << "," << p << "," << fmt_double(ms.reading(fi, p)) << "\n";
    }
    if (!os) throw io_error("write failed: " + path.string());
}

MeasurementSet load_measurements_csv(const std::filesystem::path& path) {
    auto is = open_in(path, false);
    MeasurementSet ms;
    std::string line;
    bool shape_seen = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ls(line.substr(1));
            std::string tok;
            while (ls >> tok) {
                const auto eq = tok.find('=');
                if (eq == std::string::npos) continue;
                const std::string key = tok.substr(0, eq);
                const std::string val = tok.substr(eq + 1);
                if (key == "lattice") {
                    ms.plan.shape.two_d = val == "2d";
                    shape_seen = true;
                } else if (key == "u") {
                    ms.plan.shape.u = std::stoi(val);
                } else if (key == "v") {
                    ms.plan.shape.v = std::stoi(val);
                } else if (key == "n") {
                    ms.plan.shape.n = std::stoll(val);
                } else if (key == "sr") {
                    ms.plan.sr = std::stod(val);
                } else if (key == "noise") {
                    ms.noise.kind = val == "gaussian" ? NoiseConfig::Kind::Gaussian
                                                      : NoiseConfig::Kind::None;
                } else if (key == "sigma_rel") {
                    ms.noise.sigma_rel = std::stod(val);
                } else if (key == "seed") {
                    ms.noise.seed = std::stoull(val);
                }
            }
            continue;
        }
        if (line.rfind("ku,", 0) == 0) continue;  // column header
        int ku = 0, kv = 0, phase = 0;
        double reading = 0.0;
        if (std::sscanf(line.c_str(), "%d,%d,%d,%lf", &ku, &kv, &phase, &reading) != 4)
            throw io_error("malformed measurement row: " + line);
        if (phase == 0) ms.plan.freqs.push_back({ku, kv});
        ms.readings.push_back(reading);
    }
    if (!shape_seen || ms.readings.size() != 4 * ms.plan.freqs.size())
        throw io_error("incomplete measurement CSV: " + path.string());
    return ms;
}

void save_measurements_bin(const std::filesystem::path& path, const MeasurementSet& ms) {
    auto os = open_out(path);
    put_bytes(os, kMeasMagic, 8);
    put_shape(os, ms.plan.shape);
    put_f64(os, ms.plan.sr);
    put_le<std::uint8_t>(os, ms.noise.kind == NoiseConfig::Kind::Gaussian ? 1 : 0);
    put_f64(os, ms.noise.sigma_rel);
    put_le(os, ms.noise.seed);
    put_le(os, static_cast<std::uint64_t>(ms.plan.n_freq()));
    for (const FreqIndex& f : ms.plan.freqs) {
        put_le(os, static_cast<std::int32_t>(f.ku));
        put_le(os, static_cast<std::int32_t>(f.kv));
    }
    for (double r : ms.readings) put_f64(os, r);
    if (!os) throw io_error("write failed: " + path.string());
}

MeasurementSet load_measurements_bin(const std::filesystem::path& path) {
    auto is = open_in(path);
    char magic[8];
    get_bytes(is, magic, 8);
    if (std::memcmp(magic, kMeasMagic, 8) != 0)
        throw io_error("bad measurement magic: " + path.string());
    MeasurementSet ms;
    ms.plan.shape = get_shape(is);
    ms.plan.sr = get_f64(is);
    ms.noise.kind = get_le<std::uint8_t>(is) ? NoiseConfig::Kind::Gaussian : NoiseConfig::Kind::None;
    ms.noise.sigma_rel = get_f64(is);
    ms.noise.seed = get_le<std::uint64_t>(is);
    const auto n = static_cast<size_t>(get_le<std::uint64_t>(is));
    ms.plan.freqs.resize(n);
    for (size_t i = 0; i < n; ++i) {
        ms.plan.freqs[i].ku = static_cast<int>(get_le<std::int32_t>(is));
        ms.plan.freqs[i].kv = static_cast<int>(get_le<std::int32_t>(is));
    }
    ms.readings.resize(4 * n);
    for (size_t i = 0; i < 4 * n; ++i) ms.readings[i] = get_f64(is);
    return ms;
}

// ---- spectra and plans -----------------------------------------------------------

namespace {
constexpr char kSpecMagic[8] = {'U', 'F', 'S', 'S', 'P', 'E', 'C', '1'};
}

void save_spectrum(const std::filesystem::path& path, const Spectrum& spectrum) {
    auto os = open_out(path);
    put_bytes(os, kSpecMagic, 8);
    put_shape(os, spectrum.shape);
    for (const auto& c : spectrum.coeffs) {
        put_f64(os, c.real());
        put_f64(os, c.imag());
    }
    put_bytes(os, spectrum.measured.data(), spectrum.measured.size());
    if (!os) throw io_error("write failed: " + path.string());
}

Spectrum load_spectrum(const std::filesystem::path& path) {
    auto is = open_in(path);
    char magic[8];
    get_bytes(is, magic, 8);
    if (std::memcmp(magic, kSpecMagic, 8) != 0)
        throw io_error("bad spectrum magic: " + path.string());
    Spectrum spectrum;
    spectrum.shape = get_shape(is);
    const auto pts = static_cast<size_t>(spectrum.shape.points());
    spectrum.coeffs.resize(pts);
    for (size_t i = 0; i < pts; ++i) {
        const double re = get_f64(is);
        const double im = get_f64(is);
        spectrum.coeffs[i] = {re, im};
    }
    spectrum.measured.resize(pts);
    get_bytes(is, spectrum.measured.data(), pts);
    return spectrum;
}

void save_plan_csv(const std::filesystem::path& path, const FrequencyPlan& plan) {
    auto os = open_out(path, false);
    os << "# uffsi-plan v1\n";
    os << "# " << shape_comment(plan.shape) << " sr=" << fmt_double(plan.sr)
       << " n_freq=" << plan.n_freq() << " n_measurements=" << plan.n_measurements() << "\n";
    os << "index,ku,kv,magnitude\n";
    for (std::int64_t i = 0; i < plan.n_freq(); ++i) {
        const FreqIndex f = plan.freqs[static_cast<size_t>(i)];
        double mag;
        if (plan.shape.two_d)
            mag = std::hypot(static_cast<double>(f.ku) / plan.shape.u,
                             static_cast<double>(f.kv) / plan.shape.v);
        else
            mag = std::abs(static_cast<double>(f.ku)) / static_cast<double>(plan.shape.n);
        os << i << "," << f.ku << "," << f.kv << "," << fmt_double(mag) << "\n";
    }
    if (!os) throw io_error("write failed: " + path.string());
}

// ---- comparison reports ------------------------------------------------------------

void save_report_csv(const std::filesystem::path& path, const ComparisonReport& report) {
    auto os = open_out(path, false);
    os << "# uffsi-report v1\n";
    os << "# seed=" << report.seed << " config_hash=" << report.config_hash << "\n";
    for (const auto& w : report.warnings) os << "# warning: " << w << "\n";
    os << "arm,data_count,lattice_points,sr,n_freq,n_measurements,"
          "roi_psnr_db,roi_ssim,global_psnr_db,redundancy,clamped\n";
    for (const auto& a : report.arms) {
        os << a.name << "," << a.data_count << "," << a.lattice_points << ","
           << fmt_double(a.sr) << "," << a.n_freq << "," << a.n_measurements << ","
           << fmt_double(a.roi_psnr_db) << "," << fmt_double(a.roi_ssim) << ","
           << fmt_double(a.global_psnr_db) << "," << fmt_double(a.redundancy) << ","
           << (a.clamped ? 1 : 0) << "\n";
    }
    if (!os) throw io_error("write failed: " + path.string());
}

std::string report_pretty(const ComparisonReport& report) {
    std::ostringstream os;
    os << "comparison (seed " << report.seed << ", config hash " << report.config_hash << ")\n";
    for (const auto& w : report.warnings) os << "warning: " << w << "\n";
    char buf[256];
    for (const auto& a : report.arms) {
        std::snprintf(buf, sizeof(buf),
                      "%-7s data=%-8lld sr=%-9.5f meas=%-7lld roi_psnr=%-8.3f roi_ssim=%-7.4f "
                      "global_psnr=%-8.3f redundancy=%.3f%s\n",
                      a.name.c_str(), static_cast<long long>(a.data_count), a.sr,
                      static_cast<long long>(a.n_measurements), a.roi_psnr_db, a.roi_ssim,
                      a.global_psnr_db, a.redundancy, a.clamped ? " (clamped)" : "");
        os << buf;
    }
    return os.str();
}

}  // namespace uffsi
