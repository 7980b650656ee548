#pragma once

#include <optional>
#include <string>
#include <vector>

#include "thz/beam.hpp"
#include "thz/image.hpp"
#include "thz/subspace.hpp"

namespace thz::deblur {

struct DeblurMethod {
    enum class Variant { RichardsonLucy, Wiener, HyperLaplacian };

    Variant variant = Variant::RichardsonLucy;
    int iterations = 20;          ///< Richardson-Lucy
    std::optional<double> nsr;    ///< Wiener; empty = derive from the noise level
    double lambda_reg = 5e-4;     ///< hyper-Laplacian prior weight
    double alpha = 2.0 / 3.0;     ///< hyper-Laplacian exponent, 1/2 or 2/3
    int outer_iterations = 4;     ///< hyper-Laplacian continuation steps (beta = 4^k)

    static DeblurMethod richardson_lucy(int iterations = 20);
    static DeblurMethod wiener(std::optional<double> nsr = std::nullopt);
    static DeblurMethod hyper_laplacian(double lambda_reg = 5e-4, double alpha = 2.0 / 3.0, int outer_iterations = 4);

    void validate() const;
};

std::string to_string(DeblurMethod::Variant v);
DeblurMethod::Variant deblur_variant_from_string(const std::string& name);

/// Denominator guard shared by the solvers.
inline constexpr double kDivisionGuard = 1e-12;

/// Multiplicative Richardson-Lucy from x0 = y with reflective boundaries.
/// Inputs with negative values are shifted to a zero minimum and shifted back.
Image richardson_lucy(const Image& image, const beam::Psf& psf, int iterations);

/// conj(H) / (|H|^2 + nsr) applied on the mirror-extended image.
Image wiener(const Image& image, const beam::Psf& psf, double nsr);

/// Half-quadratic splitting for 1/(2 lambda) |h*x - y|^2 + sum |grad x|^alpha,
/// beta = 1, 4, 16, ... for `outer_iterations` levels.
Image hyper_laplacian(const Image& image, const beam::Psf& psf, double lambda_reg, double alpha, int outer_iterations);

/// Inner alternations per continuation level of hyper_laplacian().
inline constexpr int kHyperLaplacianInner = 3;

/// Minimizer of |w|^alpha + beta/2 (w - v)^2 (exact scalar solve).
double shrink_hyper_laplacian(double v, double alpha, double beta);

/// Lookup table over a fixed grid of |v| in [0, v_max] for the scalar shrinkage above.
class ShrinkageTable {
public:
    ShrinkageTable(double alpha, double beta, double v_max, int samples = 8192);
    double operator()(double v) const;

private:
    double alpha_, beta_, v_max_, dv_;
    std::vector<double> table_;
};

/// Single-image dispatch. `noise_sigma` feeds the default Wiener NSR (sigma^2 / var(image)).
Image deblur_image(const Image& image, const beam::Psf& psf, const DeblurMethod& method, double noise_sigma = 0.0);

/// Deconvolves eigen-image k with psfs[k]; Richardson-Lucy uses the shift convention.
subspace::EigenImageSet deblur_eigen_images(const subspace::EigenImageSet& eigen, const std::vector<beam::Psf>& psfs,
                                            const DeblurMethod& method, const std::vector<double>& noise_sigmas = {},
                                            unsigned workers = 0);

} // namespace thz::deblur
