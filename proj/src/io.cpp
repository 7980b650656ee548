#include "thz/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include <png.h>

#include "thz/error.hpp"

namespace thz::io {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
    using U = std::conditional_t<sizeof(T) == 2, std::uint16_t, std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>;
    const U bits = std::bit_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

template <typename T>
T get_le(const std::uint8_t* p) {
    using U = std::conditional_t<sizeof(T) == 2, std::uint16_t, std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>;
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(p[i]) << (8 * i);
    return std::bit_cast<T>(bits);
}

struct PngWriter {
    png_structp png = nullptr;
    png_infop info = nullptr;
    std::FILE* fp = nullptr;
    ~PngWriter() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        if (fp) std::fclose(fp);
    }
};

void write_png(const std::filesystem::path& path, int width, int height, int color_type, int channels,
               const std::vector<std::uint8_t>& pixels) {
    if (width <= 0 || height <= 0 || pixels.size() != static_cast<std::size_t>(width) * height * channels)
        fail(ErrorKind::Validation, "PNG buffer does not match its shape");
    PngWriter w;
    w.fp = std::fopen(path.c_str(), "wb");
    if (!w.fp) fail(ErrorKind::Io, "cannot open for writing: " + path.string());
    w.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!w.png) fail(ErrorKind::Io, "png_create_write_struct failed");
    w.info = png_create_info_struct(w.png);
    if (!w.info) fail(ErrorKind::Io, "png_create_info_struct failed");
    if (setjmp(png_jmpbuf(w.png))) fail(ErrorKind::Io, "libpng error while writing " + path.string());
    png_init_io(w.png, w.fp);
    png_set_IHDR(w.png, w.info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8, color_type,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(w.png, w.info);
    for (int y = 0; y < height; ++y) {
        auto* row = const_cast<png_bytep>(pixels.data() + static_cast<std::size_t>(y) * width * channels);
        png_write_row(w.png, row);
    }
    png_write_end(w.png, nullptr);
}

} // namespace

std::uint64_t container_size(std::uint64_t bands, std::uint64_t ny, std::uint64_t nx) {
    return kHeaderBytes + 8 * bands + 4 * bands * ny * nx;
}

std::vector<std::uint8_t> encode_cube(const HyperCube& cube) {
    const auto& g = cube.geometry();
    std::vector<std::uint8_t> out;
    out.reserve(container_size(g.bands(), g.ny, g.nx));
    out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
    put_le<std::uint16_t>(out, kVersion);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.bands()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.ny));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.nx));
    put_le<double>(out, g.step_x);
    put_le<double>(out, g.step_y);
    for (double f : g.frequencies) put_le<double>(out, f);
    for (double v : cube.data()) {
        const float f = static_cast<float>(v);
        if (!std::isfinite(f)) fail(ErrorKind::Validation, "value not representable as a finite 32-bit float");
        put_le<float>(out, f);
    }
    return out;
}

HyperCube decode_cube(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 6) fail(ErrorKind::Format, "file too short for a cube header");
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) fail(ErrorKind::Format, "bad magic (expected THZC)");
    const auto version = get_le<std::uint16_t>(bytes.data() + 4);
    if (version != kVersion) fail(ErrorKind::Format, "unsupported container version " + std::to_string(version));
    if (bytes.size() < kHeaderBytes) fail(ErrorKind::Corruption, "truncated header");
    const std::uint8_t* p = bytes.data() + 6;
    const std::uint64_t b = get_le<std::uint32_t>(p);
    const std::uint64_t ny = get_le<std::uint32_t>(p + 4);
    const std::uint64_t nx = get_le<std::uint32_t>(p + 8);
    if (b == 0 || ny == 0 || nx == 0) fail(ErrorKind::Corruption, "zero dimension in header");
    if (ny > std::numeric_limits<int>::max() || nx > std::numeric_limits<int>::max() ||
        b > std::numeric_limits<int>::max())
        fail(ErrorKind::Corruption, "dimension exceeds supported range");
    const std::uint64_t expected = container_size(b, ny, nx);
    if (bytes.size() != expected)
        fail(ErrorKind::Corruption, "payload size " + std::to_string(bytes.size()) + " bytes, expected " +
                                        std::to_string(expected));
    CubeGeometry g;
    g.ny = static_cast<int>(ny);
    g.nx = static_cast<int>(nx);
    g.step_x = get_le<double>(p + 12);
    g.step_y = get_le<double>(p + 20);
    p = bytes.data() + kHeaderBytes;
    g.frequencies.resize(b);
    for (std::uint64_t i = 0; i < b; ++i, p += 8) g.frequencies[i] = get_le<double>(p);
    std::vector<double> data(b * ny * nx);
    for (double& v : data) {
        v = static_cast<double>(get_le<float>(p));
        p += 4;
    }
    return HyperCube(std::move(g), std::move(data));
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open: " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) fail(ErrorKind::Io, "read failure: " + path.string());
    return bytes;
}

HyperCube read_cube(const std::filesystem::path& path) { return decode_cube(read_bytes(path)); }

void write_cube(const HyperCube& cube, const std::filesystem::path& path) {
    const auto bytes = encode_cube(cube);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot open for writing: " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorKind::Io, "write failure: " + path.string());
}

std::vector<std::uint8_t> normalize_to_gray8(const Image& img) {
    std::vector<std::uint8_t> out(img.size());
    if (img.px.empty()) return out;
    const double lo = min_value(img);
    const double hi = max_value(img);
    const double range = hi - lo;
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double t = range > 0.0 ? (img.px[i] - lo) / range : 0.5;
        out[i] = static_cast<std::uint8_t>(std::min(255.0, std::floor(t * 255.0 + 0.5)));
    }
    return out;
}

void write_png_gray(const std::filesystem::path& path, int width, int height, const std::vector<std::uint8_t>& pixels) {
    write_png(path, width, height, PNG_COLOR_TYPE_GRAY, 1, pixels);
}

void write_png_rgb(const std::filesystem::path& path, int width, int height, const std::vector<std::uint8_t>& rgb) {
    write_png(path, width, height, PNG_COLOR_TYPE_RGB, 3, rgb);
}

void export_band(const HyperCube& cube, int band_index, const std::filesystem::path& path) {
    if (band_index < 0 || band_index >= cube.bands())
        fail(ErrorKind::Validation, "band index " + std::to_string(band_index) + " out of range");
    const Image img = cube.band_image(band_index);
    write_png_gray(path, img.nx, img.ny, normalize_to_gray8(img));
}

std::string format_number(double v) {
    if (std::isnan(v)) return "";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string CsvTable::to_string() const {
    std::ostringstream os;
    auto emit = [&os](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) os << ',';
            os << cells[i];
        }
        os << '\n';
    };
    emit(header);
    for (const auto& r : rows) emit(r);
    return os.str();
}

void CsvTable::write(const std::filesystem::path& path) const { write_text(path, to_string()); }

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot open for writing: " + path.string());
    out << text;
    if (!out) fail(ErrorKind::Io, "write failure: " + path.string());
}

} // namespace thz::io
