#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "thz/hypercube.hpp"
#include "thz/image.hpp"

namespace thz::metrics {

/// Rectangle in millimetres from the cube origin.
struct RegionOfInterest {
    double x0 = 0.0;
    double y0 = 0.0;
    double width = 0.0;
    double height = 0.0;
};

/// Pixel rectangle [x, x + w) x [y, y + h).
struct PixelRect {
    int x = 0, y = 0, w = 0, h = 0;
};

/// floor() for the start, ceil() for the extent; throws if outside the cube.
PixelRect to_pixels(const RegionOfInterest& roi, const HyperCube& cube);

struct BandStd {
    std::vector<double> std_dev;
    std::vector<double> log10_std; ///< -inf for a zero deviation
};

/// Per-band sample standard deviation over the region.
BandStd flat_region_std(const HyperCube& cube, const RegionOfInterest& roi);

struct CrossSection {
    enum class Axis { Row, Column };
    Axis axis = Axis::Row;
    int index = 0;
    int begin = 0; ///< first pixel of the span
    int end = 0;   ///< one past the last pixel; 0 means the full line
};

std::vector<double> extract_profile(const Image& band, const CrossSection& section);

/// Relative step size below which a profile counts as flat when locating the
/// high and low peaks around an edge.
inline constexpr double kFlatTolerance = 0.01;
/// Minimum peak-to-peak contrast, relative to the profile range, for a reliable measurement.
inline constexpr double kReliableContrast = 0.8;
/// Largest step outside the edge, relative to the edge contrast, for a reliable measurement.
inline constexpr double kIsolatedStep = 0.5;

struct Sharpness {
    std::optional<double> distance_mm; ///< empty when no interior extremum pair exists
    bool reliable = false; ///< strong edge contrast and no comparable step elsewhere in the span
    int high_index = -1;
    int low_index = -1;
};

/// Distance between the high and low peaks that bracket the steepest edge of a profile.
/// From the steepest step the profile is followed uphill and downhill until it
/// flattens (step <= kFlatTolerance * range); both stops must be interior to the span.
Sharpness profile_sharpness(const std::vector<double>& profile, double step_mm);

std::vector<Sharpness> feature_sharpness(const HyperCube& cube, const CrossSection& section);

struct ErrorStats {
    double mse = 0.0;
    double psnr = 0.0; ///< +inf for identical inputs
};

struct MsePsnr {
    std::vector<ErrorStats> per_band;
    ErrorStats aggregate;
};

/// Standard MSE and PSNR with peak = max(reference).
MsePsnr mse_psnr(const HyperCube& cube, const HyperCube& reference);

/// CSV rendering of PSNR: identical inputs are capped at 99 dB.
inline constexpr double kPsnrCap = 99.0;
double capped_psnr(double psnr);

/// Trapezoidal integral over bands with frequency in [f_lo, f_hi], not normalized.
Image integrate_range_raw(const HyperCube& cube, double f_lo, double f_hi);
/// Integral divided by the covered frequency span; a single band in range is returned as is.
Image integrate_range(const HyperCube& cube, double f_lo, double f_hi);

struct FrequencyRange {
    double lo = 0.0;
    double hi = 0.0;
    bool operator==(const FrequencyRange&) const = default;
};

struct FalseColorRanges {
    FrequencyRange red{0.4, 0.8};
    FrequencyRange green{1.7, 2.1};
    FrequencyRange blue{4.5, 5.5};
};

struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb; ///< interleaved

    std::vector<std::uint8_t> channel(int c) const;
};

/// Each channel is the min-max normalized integrated amplitude over its range;
/// a constant channel maps to 0.
RgbImage false_color(const HyperCube& cube, const FalseColorRanges& ranges = {});

/// Global (single-window) structural similarity of two equally sized 8-bit channels.
double ssim(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b);

/// 10%-90% rise distance in pixels of an edge profile (linear interpolation).
/// The direction is taken from the profile's end points.
std::optional<double> rise_distance(const std::vector<double>& profile);

} // namespace thz::metrics
