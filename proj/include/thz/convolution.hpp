#pragma once

#include <complex>
#include <vector>

#include "thz/beam.hpp"
#include "thz/image.hpp"

namespace thz {

/// Real-to-complex transforms on the 2ny x 2nx half-sample symmetric extension of
/// an ny x nx image. Circular convolution on that grid equals convolution with
/// reflective (mirror, edge sample repeated) boundaries, for any kernel size.
class ExtendedFft {
public:
    using Spectrum = std::vector<std::complex<double>>;

    ExtendedFft(int ny, int nx);

    int ny() const { return ny_; }
    int nx() const { return nx_; }
    int ext_ny() const { return 2 * ny_; }
    int ext_nx() const { return 2 * nx_; }
    /// Number of complex coefficients (ext_ny * (ext_nx / 2 + 1)).
    std::size_t spectrum_size() const;

    /// Spectrum of the symmetric extension of `img`.
    Spectrum forward_extended(const Image& img) const;
    /// Spectrum of `img` zero-padded into the top-left corner of the extended grid.
    Spectrum forward_padded(const Image& img) const;
    /// Spectrum of a kernel centered at the origin with circular wrap (aliased if larger than the grid).
    Spectrum kernel_spectrum(const beam::Psf& psf, bool flipped = false) const;
    /// Spectrum of a small convolution kernel given as (dy, dx, weight) taps; tap (dy, dx) weights x[i - d].
    Spectrum stencil_spectrum(const std::vector<std::tuple<int, int, double>>& taps) const;

    /// Spectrum of an arbitrary real field already laid out on the extended grid.
    Spectrum forward_grid(const std::vector<double>& grid) const;

    /// Inverse transform; returns the full extended real grid (normalized).
    std::vector<double> inverse(const Spectrum& spec) const;
    /// Inverse transform restricted to the top-left ny x nx block.
    Image inverse_restricted(const Spectrum& spec) const;
    /// Inverse transform followed by the adjoint of the symmetric extension (fold).
    Image inverse_folded(const Spectrum& spec) const;

    /// Frequency index pair (ky, kx) of coefficient i, with ky in [0, ext_ny) and kx in [0, ext_nx/2].
    std::pair<int, int> frequency_of(std::size_t i) const;

private:
    int ny_;
    int nx_;
};

/// Reflective-boundary convolution with a fixed kernel on a fixed image shape.
class ReflectiveConvolver {
public:
    ReflectiveConvolver(int ny, int nx, const beam::Psf& psf);

    /// y = h * x with mirror boundaries; output has the input shape.
    Image apply(const Image& x) const;
    /// Exact adjoint of apply(); equals apply() for symmetric kernels.
    Image apply_adjoint(const Image& x) const;

    const ExtendedFft& fft() const { return fft_; }
    const ExtendedFft::Spectrum& otf() const { return otf_; }
    bool is_identity() const { return delta_; }

private:
    ExtendedFft fft_;
    ExtendedFft::Spectrum otf_;
    ExtendedFft::Spectrum otf_flipped_;
    bool delta_;
};

/// Convenience wrapper for one-off convolutions.
Image convolve_reflective(const Image& x, const beam::Psf& psf);

/// Index of x in [0, n) under half-sample symmetric periodic extension.
int reflect_index(int i, int n);

} // namespace thz
