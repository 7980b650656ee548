#pragma once

#include <vector>

namespace thz::beam {

/// Speed of light expressed in mm * THz.
inline constexpr double kLightSpeedMmThz = 0.299792458;

/// Focusing optics. Only the ratio focal_length / aperture_diameter enters the waist.
struct BeamGeometry {
    double focal_length = 4.0;      ///< mm (f_L)
    double aperture_diameter = 1.0; ///< mm (D)

    double f_number() const { return focal_length / aperture_diameter; }
    void validate() const;

    static BeamGeometry from_f_number(double f_number) { return BeamGeometry{f_number, 1.0}; }
};

struct BeamParams {
    double wavelength;      ///< mm
    double waist_radius;    ///< mm (w0)
    double rayleigh_length; ///< mm (z_R = pi w0^2 / lambda)

    static BeamParams from_waist(double wavelength, double waist_radius);
};

double wavelength_from_frequency(double frequency_thz);
/// Minimum beam radius w0 = (2/pi) * lambda * f_L / D.
double beam_waist(double wavelength, const BeamGeometry& geom);
BeamParams beam_params(double frequency_thz, const BeamGeometry& geom);
/// w(z) = w0 sqrt(1 + (z/z_R)^2).
double beam_radius(double z, const BeamParams& params);
/// Transverse intensity I(r, z) = P / (pi w(z)^2 / 2) * exp(-2 r^2 / w(z)^2).
double intensity(double r, double z, double power, const BeamParams& params);

/// Discrete 2D blur kernel of odd size (2k+1) x (2k+1), row-major, summing to one.
struct Psf {
    int half_width = 0;
    std::vector<double> kernel{1.0};
    double step = 1.0;  ///< mm per pixel
    double sigma = 0.0; ///< mm; 0 for the delta kernel

    int size() const { return 2 * half_width + 1; }
    double at(int dy, int dx) const { return kernel[(dy + half_width) * size() + (dx + half_width)]; }
    bool is_delta() const { return half_width == 0; }
    double sigma_pixels() const { return sigma / step; }

    static Psf delta(double step = 1.0);
};

inline constexpr double kDefaultTruncation = 3.0;
inline constexpr int kMaxKernelSize = 4096;

/// Point-samples exp(-2 r^2 / w^2) for beam radius w on the pixel grid, half-width
/// ceil(truncation * w / step), normalized to unit sum. sigma = w / 2.
Psf gaussian_psf(double beam_radius_mm, double step, double truncation = kDefaultTruncation);

/// PSF of the beam at frequency f intersected with the plane at depth z.
Psf synthesize_psf(double frequency_thz, const BeamGeometry& geom, double step, double z = 0.0,
                   double truncation = kDefaultTruncation);

} // namespace thz::beam
