#include "thz/deblur.hpp"

#include <algorithm>
#include <cmath>

#include "thz/convolution.hpp"
#include "thz/error.hpp"
#include "thz/parallel.hpp"

namespace thz::deblur {

DeblurMethod DeblurMethod::richardson_lucy(int iterations) {
    DeblurMethod m;
    m.variant = Variant::RichardsonLucy;
    m.iterations = iterations;
    return m;
}

DeblurMethod DeblurMethod::wiener(std::optional<double> nsr) {
    DeblurMethod m;
    m.variant = Variant::Wiener;
    m.nsr = nsr;
    return m;
}

DeblurMethod DeblurMethod::hyper_laplacian(double lambda_reg, double alpha, int outer_iterations) {
    DeblurMethod m;
    m.variant = Variant::HyperLaplacian;
    m.lambda_reg = lambda_reg;
    m.alpha = alpha;
    m.outer_iterations = outer_iterations;
    return m;
}

void DeblurMethod::validate() const {
    switch (variant) {
    case Variant::RichardsonLucy:
        if (iterations < 1) fail(ErrorKind::Configuration, "Richardson-Lucy needs at least one iteration");
        break;
    case Variant::Wiener:
        if (nsr && !(*nsr >= 0.0)) fail(ErrorKind::Configuration, "Wiener NSR must be non-negative");
        break;
    case Variant::HyperLaplacian:
        if (!(lambda_reg > 0.0)) fail(ErrorKind::Configuration, "hyper-Laplacian lambda must be positive");
        if (std::abs(alpha - 0.5) > 1e-12 && std::abs(alpha - 2.0 / 3.0) > 1e-12)
            fail(ErrorKind::Configuration, "hyper-Laplacian alpha must be 1/2 or 2/3");
        if (outer_iterations < 1) fail(ErrorKind::Configuration, "hyper-Laplacian needs at least one outer iteration");
        break;
    }
}

std::string to_string(DeblurMethod::Variant v) {
    switch (v) {
    case DeblurMethod::Variant::RichardsonLucy: return "rl";
    case DeblurMethod::Variant::Wiener: return "wiener";
    case DeblurMethod::Variant::HyperLaplacian: return "hyplap";
    }
    return "unknown";
}

DeblurMethod::Variant deblur_variant_from_string(const std::string& name) {
    if (name == "rl") return DeblurMethod::Variant::RichardsonLucy;
    if (name == "wiener") return DeblurMethod::Variant::Wiener;
    if (name == "hyplap") return DeblurMethod::Variant::HyperLaplacian;
    fail(ErrorKind::Configuration, "unknown deblur method: " + name);
}

Image richardson_lucy(const Image& image, const beam::Psf& psf, int iterations) {
    if (iterations < 1) fail(ErrorKind::Configuration, "Richardson-Lucy needs at least one iteration");
    if (psf.is_delta() || image.px.empty()) return image;

    const double offset = std::min(0.0, min_value(image));
    Image y = image;
    if (offset < 0.0)
        for (double& v : y.px) v -= offset;

    const ReflectiveConvolver H(y.ny, y.nx, psf);
    Image x = y;
    Image ratio(y.ny, y.nx);
    for (int it = 0; it < iterations; ++it) {
        const Image hx = H.apply(x);
        for (std::size_t i = 0; i < ratio.size(); ++i) ratio.px[i] = y.px[i] / std::max(hx.px[i], kDivisionGuard);
        const Image corr = H.apply_adjoint(ratio);
        for (std::size_t i = 0; i < x.size(); ++i) x.px[i] = std::max(0.0, x.px[i] * corr.px[i]);
    }
    if (offset < 0.0)
        for (double& v : x.px) v += offset;
    return x;
}

Image wiener(const Image& image, const beam::Psf& psf, double nsr) {
    if (!(nsr >= 0.0)) fail(ErrorKind::Configuration, "Wiener NSR must be non-negative");
    if (psf.is_delta()) {
        Image out = image;
        const double g = 1.0 / (1.0 + nsr);
        for (double& v : out.px) v *= g;
        return out;
    }
    const ReflectiveConvolver H(image.ny, image.nx, psf);
    const auto& otf = H.otf();
    auto s = H.fft().forward_extended(image);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double denom = std::max(std::norm(otf[i]) + nsr, kDivisionGuard);
        s[i] *= std::conj(otf[i]) / denom;
    }
    return H.fft().inverse_restricted(s);
}

double shrink_hyper_laplacian(double v, double alpha, double beta) {
    const double a = std::abs(v);
    if (a == 0.0) return 0.0;
    // For w > 0, g(w) = alpha w^(alpha-1) + beta (w - a) is increasing beyond w_c.
    const double w_c = std::pow(alpha * (1.0 - alpha) / beta, 1.0 / (2.0 - alpha));
    auto g = [&](double w) { return alpha * std::pow(w, alpha - 1.0) + beta * (w - a); };
    if (w_c >= a || g(w_c) > 0.0) return 0.0;
    double lo = w_c, hi = a;
    for (int i = 0; i < 100 && hi - lo > 1e-15 * a; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) > 0.0 ? hi : lo) = mid;
    }
    const double w = 0.5 * (lo + hi);
    const double f_w = std::pow(w, alpha) + 0.5 * beta * (w - a) * (w - a);
    const double f_0 = 0.5 * beta * a * a;
    const double best = f_w < f_0 ? w : 0.0;
    return v < 0.0 ? -best : best;
}

ShrinkageTable::ShrinkageTable(double alpha, double beta, double v_max, int samples)
    : alpha_(alpha), beta_(beta), v_max_(v_max > 0.0 ? v_max : 1.0), dv_(0.0), table_(samples + 1) {
    dv_ = v_max_ / samples;
    for (int i = 0; i <= samples; ++i) table_[i] = shrink_hyper_laplacian(i * dv_, alpha_, beta_);
}

double ShrinkageTable::operator()(double v) const {
    const double a = std::abs(v);
    double w;
    if (a >= v_max_) {
        w = shrink_hyper_laplacian(a, alpha_, beta_);
    } else {
        const double t = a / dv_;
        const auto i = static_cast<std::size_t>(t);
        const double frac = t - static_cast<double>(i);
        w = table_[i] + frac * (table_[i + 1] - table_[i]);
    }
    return v < 0.0 ? -w : w;
}

Image hyper_laplacian(const Image& image, const beam::Psf& psf, double lambda_reg, double alpha, int outer_iterations) {
    DeblurMethod::hyper_laplacian(lambda_reg, alpha, outer_iterations).validate();
    const ExtendedFft fft(image.ny, image.nx);
    const int ey = fft.ext_ny(), ex = fft.ext_nx();
    const std::size_t n_ext = static_cast<std::size_t>(ey) * ex;

    // Everything runs on the periodic mirror extension, so the problem stays
    // reflection-symmetric and the restriction is the reflective-boundary solution.
    const auto K = psf.is_delta() ? ExtendedFft::Spectrum(fft.spectrum_size(), 1.0) : fft.kernel_spectrum(psf);
    const auto Dx = fft.stencil_spectrum({{0, 0, -1.0}, {0, -1, 1.0}});
    const auto Dy = fft.stencil_spectrum({{0, 0, -1.0}, {-1, 0, 1.0}});
    const auto Y = fft.forward_extended(image);
    const double data_weight = 1.0 / lambda_reg;

    ExtendedFft::Spectrum numer_data(Y.size());
    for (std::size_t i = 0; i < Y.size(); ++i) numer_data[i] = data_weight * std::conj(K[i]) * Y[i];

    std::vector<double> x = fft.inverse(Y);
    auto gradients = [&](const std::vector<double>& g, std::vector<double>& gx, std::vector<double>& gy) {
        for (int r = 0; r < ey; ++r)
            for (int c = 0; c < ex; ++c) {
                const std::size_t i = static_cast<std::size_t>(r) * ex + c;
                gx[i] = g[static_cast<std::size_t>(r) * ex + (c + 1) % ex] - g[i];
                gy[i] = g[static_cast<std::size_t>((r + 1) % ey) * ex + c] - g[i];
            }
    };
    std::vector<double> gx(n_ext), gy(n_ext);
    gradients(x, gx, gy);
    double v_max = 0.0;
    for (std::size_t i = 0; i < n_ext; ++i) v_max = std::max({v_max, std::abs(gx[i]), std::abs(gy[i])});
    v_max *= 2.0;

    double beta = 1.0;
    for (int outer = 0; outer < outer_iterations; ++outer, beta *= 4.0) {
        const ShrinkageTable shrink(alpha, beta, v_max);
        for (int inner = 0; inner < kHyperLaplacianInner; ++inner) {
            gradients(x, gx, gy);
            for (std::size_t i = 0; i < n_ext; ++i) {
                gx[i] = shrink(gx[i]);
                gy[i] = shrink(gy[i]);
            }
            const auto Wx = fft.forward_grid(gx);
            const auto Wy = fft.forward_grid(gy);
            ExtendedFft::Spectrum X(Y.size());
            for (std::size_t i = 0; i < X.size(); ++i) {
                const std::complex<double> num = numer_data[i] + beta * (std::conj(Dx[i]) * Wx[i] + std::conj(Dy[i]) * Wy[i]);
                const double den = data_weight * std::norm(K[i]) + beta * (std::norm(Dx[i]) + std::norm(Dy[i]));
                X[i] = num / std::max(den, kDivisionGuard);
            }
            x = fft.inverse(X);
        }
    }
    Image out(image.ny, image.nx);
    for (int r = 0; r < image.ny; ++r)
        for (int c = 0; c < image.nx; ++c) out(r, c) = x[static_cast<std::size_t>(r) * ex + c];
    return out;
}

Image deblur_image(const Image& image, const beam::Psf& psf, const DeblurMethod& method, double noise_sigma) {
    method.validate();
    switch (method.variant) {
    case DeblurMethod::Variant::RichardsonLucy: return richardson_lucy(image, psf, method.iterations);
    case DeblurMethod::Variant::Wiener: {
        double nsr = 0.0;
        if (method.nsr) {
            nsr = *method.nsr;
        } else {
            const double var = variance(image);
            nsr = var > 0.0 ? noise_sigma * noise_sigma / var : 0.0;
        }
        return wiener(image, psf, nsr);
    }
    case DeblurMethod::Variant::HyperLaplacian:
        return hyper_laplacian(image, psf, method.lambda_reg, method.alpha, method.outer_iterations);
    }
    return image;
}

subspace::EigenImageSet deblur_eigen_images(const subspace::EigenImageSet& eigen, const std::vector<beam::Psf>& psfs,
                                            const DeblurMethod& method, const std::vector<double>& noise_sigmas,
                                            unsigned workers) {
    method.validate();
    if (static_cast<int>(psfs.size()) != eigen.p()) fail(ErrorKind::Configuration, "need one PSF per eigen-image");
    if (!noise_sigmas.empty() && static_cast<int>(noise_sigmas.size()) != eigen.p())
        fail(ErrorKind::Configuration, "need one noise level per eigen-image");
    subspace::EigenImageSet out = eigen;
    std::vector<Image> results(psfs.size());
    parallel_for(psfs.size(), workers, [&](std::size_t k) {
        Image img = eigen.image(static_cast<int>(k));
        if (psfs[k].is_delta()) {
            results[k] = std::move(img);
            return;
        }
        if (method.variant == DeblurMethod::Variant::RichardsonLucy) {
            // Shift-RL: eigen-images are signed, so RL runs on the copy shifted to a zero minimum.
            const double lo = min_value(img);
            for (double& v : img.px) v -= lo;
            img = richardson_lucy(img, psfs[k], method.iterations);
            for (double& v : img.px) v += lo;
            results[k] = std::move(img);
            return;
        }
        results[k] = deblur_image(img, psfs[k], method, noise_sigmas.empty() ? 0.0 : noise_sigmas[k]);
    });
    for (std::size_t k = 0; k < results.size(); ++k) out.set_image(static_cast<int>(k), results[k]);
    return out;
}

} // namespace thz::deblur
