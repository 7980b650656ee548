#include "thz/beam.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "thz/error.hpp"

namespace thz::beam {

void BeamGeometry::validate() const {
    if (!(focal_length > 0.0) || !(aperture_diameter > 0.0))
        fail(ErrorKind::Configuration, "focal length and aperture diameter must be positive");
}

BeamParams BeamParams::from_waist(double wavelength, double waist_radius) {
    if (!(wavelength > 0.0) || !(waist_radius > 0.0))
        fail(ErrorKind::Domain, "wavelength and waist must be positive");
    return {wavelength, waist_radius, std::numbers::pi * waist_radius * waist_radius / wavelength};
}

double wavelength_from_frequency(double frequency_thz) {
    if (!(frequency_thz > 0.0)) fail(ErrorKind::Domain, "frequency must be positive");
    return kLightSpeedMmThz / frequency_thz;
}

double beam_waist(double wavelength, const BeamGeometry& geom) {
    geom.validate();
    if (!(wavelength > 0.0)) fail(ErrorKind::Domain, "wavelength must be positive");
    return 2.0 / std::numbers::pi * wavelength * geom.focal_length / geom.aperture_diameter;
}

BeamParams beam_params(double frequency_thz, const BeamGeometry& geom) {
    const double lambda = wavelength_from_frequency(frequency_thz);
    return BeamParams::from_waist(lambda, beam_waist(lambda, geom));
}

double beam_radius(double z, const BeamParams& params) {
    const double t = z / params.rayleigh_length;
    return params.waist_radius * std::sqrt(1.0 + t * t);
}

double intensity(double r, double z, double power, const BeamParams& params) {
    if (power < 0.0) fail(ErrorKind::Domain, "beam power must be non-negative");
    const double w = beam_radius(z, params);
    return power / (std::numbers::pi * w * w / 2.0) * std::exp(-2.0 * r * r / (w * w));
}

Psf Psf::delta(double step) {
    Psf p;
    p.step = step;
    return p;
}

Psf gaussian_psf(double beam_radius_mm, double step, double truncation) {
    if (!(step > 0.0)) fail(ErrorKind::Configuration, "pixel step must be positive");
    if (!(truncation >= 2.0)) fail(ErrorKind::Configuration, "truncation radius must be at least 2 beam radii");
    if (beam_radius_mm == 0.0) return Psf::delta(step);
    if (!(beam_radius_mm > 0.0)) fail(ErrorKind::Configuration, "beam radius must be non-negative");

    const double k_real = std::ceil(truncation * beam_radius_mm / step);
    if (2.0 * k_real + 1.0 > kMaxKernelSize)
        fail(ErrorKind::Configuration, "PSF kernel would exceed " + std::to_string(kMaxKernelSize) +
                                           " pixels per side; step too small for beam radius");
    Psf psf;
    psf.half_width = static_cast<int>(k_real);
    psf.step = step;
    psf.sigma = beam_radius_mm / 2.0;
    const int n = psf.size();
    psf.kernel.assign(static_cast<std::size_t>(n) * n, 0.0);

    // Separable samples; the 2D product keeps exact flip/transpose symmetry.
    std::vector<double> g(n);
    const double inv_w2 = 1.0 / (beam_radius_mm * beam_radius_mm);
    for (int i = 0; i < n; ++i) {
        const double d = (i - psf.half_width) * step;
        g[i] = std::exp(-2.0 * d * d * inv_w2);
    }
    double total = 0.0;
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) total += psf.kernel[y * n + x] = g[y] * g[x];
    for (double& v : psf.kernel) v /= total;
    return psf;
}

Psf synthesize_psf(double frequency_thz, const BeamGeometry& geom, double step, double z, double truncation) {
    const BeamParams params = beam_params(frequency_thz, geom);
    return gaussian_psf(beam_radius(z, params), step, truncation);
}

} // namespace thz::beam
