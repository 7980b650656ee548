#include "thz/denoise.hpp"

#include <algorithm>
#include <cmath>

#include "thz/convolution.hpp"
#include "thz/error.hpp"
#include "thz/parallel.hpp"

namespace thz::denoise {

void PatchDenoiseParams::validate() const {
    if (patch_size < 1 || patch_size % 2 == 0) fail(ErrorKind::Configuration, "patch size must be odd and positive");
    if (search_window < 1 || search_window % 2 == 0)
        fail(ErrorKind::Configuration, "search window must be odd and positive");
    if (search_window <= patch_size) fail(ErrorKind::Configuration, "search window must exceed the patch size");
    if (!(sigma > 0.0)) fail(ErrorKind::Configuration, "noise sigma must be positive");
    if (!(strength() > 0.0)) fail(ErrorKind::Configuration, "filtering strength must be positive");
}

Image patch_denoise(const Image& image, const PatchDenoiseParams& params) {
    params.validate();
    const int ny = image.ny, nx = image.nx;
    const int pr = params.patch_size / 2;
    const int wr = params.search_window / 2;
    const int pad = pr + wr;
    const int py = ny + 2 * pad, px = nx + 2 * pad;

    std::vector<double> padded(static_cast<std::size_t>(py) * px);
    for (int y = 0; y < py; ++y)
        for (int x = 0; x < px; ++x)
            padded[static_cast<std::size_t>(y) * px + x] = image(reflect_index(y - pad, ny), reflect_index(x - pad, nx));
    auto P = [&](int y, int x) { return padded[static_cast<std::size_t>(y + pad) * px + (x + pad)]; };

    const double h = params.strength();
    const double inv_h2 = 1.0 / (h * h);
    const double patch_n = static_cast<double>(params.patch_size) * params.patch_size;
    const double bias = 2.0 * params.sigma * params.sigma * patch_n;

    // Squared differences over centers extended by the patch radius.
    const int dy_n = ny + 2 * pr, dx_n = nx + 2 * pr;
    std::vector<double> diff(static_cast<std::size_t>(dy_n) * dx_n);
    std::vector<double> colsum(static_cast<std::size_t>(ny) * dx_n);
    std::vector<double> acc(static_cast<std::size_t>(ny) * nx, 0.0);
    std::vector<double> wsum(static_cast<std::size_t>(ny) * nx, 0.0);

    for (int oy = -wr; oy <= wr; ++oy)
        for (int ox = -wr; ox <= wr; ++ox) {
            for (int y = -pr; y < ny + pr; ++y)
                for (int x = -pr; x < nx + pr; ++x) {
                    const double d = P(y, x) - P(y + oy, x + ox);
                    diff[static_cast<std::size_t>(y + pr) * dx_n + (x + pr)] = d * d;
                }
            for (int y = 0; y < ny; ++y)
                for (int x = 0; x < dx_n; ++x) {
                    double s = 0.0;
                    for (int t = 0; t <= 2 * pr; ++t) s += diff[static_cast<std::size_t>(y + t) * dx_n + x];
                    colsum[static_cast<std::size_t>(y) * dx_n + x] = s;
                }
            for (int y = 0; y < ny; ++y)
                for (int x = 0; x < nx; ++x) {
                    double ssd = 0.0;
                    const double* row = colsum.data() + static_cast<std::size_t>(y) * dx_n + x;
                    for (int t = 0; t <= 2 * pr; ++t) ssd += row[t];
                    const double excess = ssd - bias;
                    const double w = excess > 0.0 ? std::exp(-excess * inv_h2) : 1.0;
                    const std::size_t i = static_cast<std::size_t>(y) * nx + x;
                    acc[i] += w * P(y + oy, x + ox);
                    wsum[i] += w;
                }
        }

    Image out(ny, nx);
    for (std::size_t i = 0; i < out.size(); ++i) out.px[i] = acc[i] / wsum[i];
    return out;
}

subspace::EigenImageSet denoise_eigen_images(const subspace::EigenImageSet& eigen, const std::vector<double>& sigmas,
                                             const PatchDenoiseParams& base, unsigned workers) {
    if (static_cast<int>(sigmas.size()) != eigen.p())
        fail(ErrorKind::Configuration, "need one noise level per eigen-image");
    for (double s : sigmas)
        if (!(s >= 0.0) || !std::isfinite(s)) fail(ErrorKind::Configuration, "noise levels must be non-negative");
    subspace::EigenImageSet out = eigen;
    std::vector<Image> results(sigmas.size());
    parallel_for(sigmas.size(), workers, [&](std::size_t k) {
        Image img = eigen.image(static_cast<int>(k));
        if (sigmas[k] > 0.0) {
            PatchDenoiseParams p = base;
            p.sigma = sigmas[k];
            p.h.reset();
            img = patch_denoise(img, p);
        }
        results[k] = std::move(img);
    });
    for (std::size_t k = 0; k < results.size(); ++k) out.set_image(static_cast<int>(k), results[k]);
    return out;
}

} // namespace thz::denoise
