#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "thz/beam.hpp"
#include "thz/hypercube.hpp"

namespace thz::forward {

enum class PhantomKind { DiskHole, Rings, Bars };

std::string to_string(PhantomKind kind);
PhantomKind phantom_kind_from_string(const std::string& name);

/// Amplitude varying linearly over frequency from `at_low` (first band) to `at_high` (last band).
struct Amplitude {
    double at_low = 0.0;
    double at_high = 0.0;

    static Amplitude constant(double v) { return {v, v}; }
    double at(double f, double f_min, double f_max) const;
};

struct PhantomSpec {
    PhantomKind kind = PhantomKind::DiskHole;
    int ny = 64;
    int nx = 64;
    double step = 0.2; ///< mm, both axes
    std::vector<double> frequencies;
    Amplitude background = Amplitude::constant(1.0);
    Amplitude foreground = Amplitude::constant(0.0);
    /// Disk / outer ring radius in pixels; 0 selects min(ny, nx) / 4.
    double radius_px = 0.0;
    /// Ring width or bar width in pixels.
    double feature_width_px = 4.0;

    void validate() const;
};

/// Evenly spaced axis of `bands` frequencies from f_lo to f_hi inclusive.
std::vector<double> linear_frequencies(double f_lo, double f_hi, int bands);

/// Binary foreground mask of the phantom (1 = foreground), pixel-center inclusion.
Image phantom_mask(const PhantomSpec& spec);
HyperCube generate_phantom(const PhantomSpec& spec);

struct NoiseModel {
    enum class Variant { GaussianIid, GaussianNonIid, Poisson };

    Variant variant = Variant::GaussianIid;
    double sigma = 0.0;                 ///< GaussianIid
    std::vector<double> sigma_per_band; ///< GaussianNonIid
    double gain = 1.0;                  ///< Poisson
    std::uint64_t seed = 0;

    static NoiseModel gaussian_iid(double sigma, std::uint64_t seed);
    static NoiseModel gaussian_noniid(std::vector<double> sigmas, std::uint64_t seed);
    static NoiseModel poisson(double gain, std::uint64_t seed);

    /// Noise magnitudes may be zero (noiseless); negatives and a non-positive gain are rejected.
    void validate(int bands) const;
};

std::string to_string(NoiseModel::Variant v);

/// Convolves every band with the beam PSF at its frequency (reflective boundaries).
HyperCube blur_cube(const HyperCube& cube, const beam::BeamGeometry& geom, double z = 0.0, unsigned workers = 0,
                    double truncation = beam::kDefaultTruncation);

/// Deterministic given the seed; band i draws from a generator seeded with seed ^ i.
HyperCube add_noise(const HyperCube& cube, const NoiseModel& model, unsigned workers = 0);

struct Simulation {
    HyperCube clean;
    HyperCube degraded;
};

Simulation simulate(const PhantomSpec& spec, const beam::BeamGeometry& geom, const NoiseModel& model, double z = 0.0,
                    unsigned workers = 0);

} // namespace thz::forward
