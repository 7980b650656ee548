#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "thz/hypercube.hpp"
#include "thz/image.hpp"

namespace thz::io {

// Container layout (all little-endian):
//   "THZC" | u16 version | u32 b | u32 ny | u32 nx | f64 step_x | f64 step_y
//   | f64 frequencies[b] | f32 data[b*ny*nx]   (band-major, then row-major)
inline constexpr char kMagic[4] = {'T', 'H', 'Z', 'C'};
inline constexpr std::uint16_t kVersion = 1;
inline constexpr std::size_t kHeaderBytes = 4 + 2 + 3 * 4 + 2 * 8;

/// Exact file size of a container holding a b x ny x nx cube.
std::uint64_t container_size(std::uint64_t bands, std::uint64_t ny, std::uint64_t nx);

std::vector<std::uint8_t> encode_cube(const HyperCube& cube);
HyperCube decode_cube(const std::vector<std::uint8_t>& bytes);

HyperCube read_cube(const std::filesystem::path& path);
/// Writes atomically enough for our purposes: validation happens before the file is opened.
void write_cube(const HyperCube& cube, const std::filesystem::path& path);

/// Maps an image to 8-bit gray with per-image min-max normalization (round half up).
/// A constant image maps to mid-gray (0.5 before quantization).
std::vector<std::uint8_t> normalize_to_gray8(const Image& img);

void write_png_gray(const std::filesystem::path& path, int width, int height, const std::vector<std::uint8_t>& pixels);
/// `rgb` holds interleaved R,G,B bytes.
void write_png_rgb(const std::filesystem::path& path, int width, int height, const std::vector<std::uint8_t>& rgb);

void export_band(const HyperCube& cube, int band_index, const std::filesystem::path& path);

/// Minimal CSV table: header row, '.' decimal separator, full round-trip precision.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }
    std::string to_string() const;
    void write(const std::filesystem::path& path) const;
};

std::string format_number(double v);

void write_text(const std::filesystem::path& path, const std::string& text);
std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);

} // namespace thz::io
