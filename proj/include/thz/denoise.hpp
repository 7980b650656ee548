#pragma once

#include <optional>
#include <vector>

#include "thz/image.hpp"
#include "thz/subspace.hpp"

namespace thz::denoise {

/// Non-local means parameters. The filtering strength is expressed in the
/// sum-of-squared-differences form: a candidate patch at SSD distance s gets weight
/// exp(-max(s - 2 sigma^2 N, 0) / h^2), N = patch_size^2, with h = h_factor * sigma * patch_size
/// unless given explicitly. Equivalently exp(-max(d^2 - 2 sigma^2, 0) / (h / patch_size)^2)
/// with d^2 the mean squared patch distance.
struct PatchDenoiseParams {
    int patch_size = 7;
    int search_window = 21;
    double h_factor = 0.55;
    std::optional<double> h;
    double sigma = 0.0;

    double strength() const { return h ? *h : h_factor * sigma * patch_size; }
    void validate() const;
};

Image patch_denoise(const Image& image, const PatchDenoiseParams& params);

/// Denoises eigen-image k with noise level sigmas[k] using `base` for window/patch settings.
/// A zero sigma leaves that eigen-image untouched; an explicit `base.h` is ignored.
subspace::EigenImageSet denoise_eigen_images(const subspace::EigenImageSet& eigen, const std::vector<double>& sigmas,
                                             const PatchDenoiseParams& base = {}, unsigned workers = 0);

} // namespace thz::denoise
