#include "thz/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "thz/error.hpp"

namespace thz::metrics {

PixelRect to_pixels(const RegionOfInterest& roi, const HyperCube& cube) {
    if (!(roi.width > 0.0) || !(roi.height > 0.0) || roi.x0 < 0.0 || roi.y0 < 0.0)
        fail(ErrorKind::Validation, "region must have positive size and non-negative origin");
    PixelRect r;
    r.x = static_cast<int>(std::floor(roi.x0 / cube.step_x() + 1e-9));
    r.y = static_cast<int>(std::floor(roi.y0 / cube.step_y() + 1e-9));
    r.w = static_cast<int>(std::ceil(roi.width / cube.step_x() - 1e-9));
    r.h = static_cast<int>(std::ceil(roi.height / cube.step_y() - 1e-9));
    if (r.x + r.w > cube.nx() || r.y + r.h > cube.ny()) fail(ErrorKind::Validation, "region exceeds the cube extent");
    return r;
}

BandStd flat_region_std(const HyperCube& cube, const RegionOfInterest& roi) {
    const PixelRect r = to_pixels(roi, cube);
    const double count = static_cast<double>(r.w) * r.h;
    BandStd out;
    for (int b = 0; b < cube.bands(); ++b) {
        // Deviations from the first sample keep a constant region exactly zero.
        const double ref = cube.at(b, r.y, r.x);
        double s1 = 0.0, s2 = 0.0;
        for (int y = r.y; y < r.y + r.h; ++y)
            for (int x = r.x; x < r.x + r.w; ++x) {
                const double d = cube.at(b, y, x) - ref;
                s1 += d;
                s2 += d * d;
            }
        const double ss = std::max(0.0, s2 - s1 * s1 / count);
        const double sd = count > 1.0 ? std::sqrt(ss / (count - 1.0)) : 0.0;
        out.std_dev.push_back(sd);
        out.log10_std.push_back(sd > 0.0 ? std::log10(sd) : -std::numeric_limits<double>::infinity());
    }
    return out;
}

std::vector<double> extract_profile(const Image& band, const CrossSection& s) {
    const bool row = s.axis == CrossSection::Axis::Row;
    const int line_len = row ? band.nx : band.ny;
    const int lines = row ? band.ny : band.nx;
    const int end = s.end == 0 ? line_len : s.end;
    if (s.index < 0 || s.index >= lines || s.begin < 0 || end > line_len || end - s.begin < 3)
        fail(ErrorKind::Validation, "cross-section outside the image or shorter than 3 pixels");
    std::vector<double> p;
    for (int i = s.begin; i < end; ++i) p.push_back(row ? band(s.index, i) : band(i, s.index));
    return p;
}

Sharpness profile_sharpness(const std::vector<double>& profile, double step_mm) {
    Sharpness best;
    const int n = static_cast<int>(profile.size());
    if (n < 3) return best;
    const auto [mn, mx] = std::minmax_element(profile.begin(), profile.end());
    const double range = *mx - *mn;
    if (!(range > 0.0)) return best;
    const double tol = kFlatTolerance * range;

    double steepest = 0.0;
    for (int i = 0; i + 1 < n; ++i) steepest = std::max(steepest, std::abs(profile[i + 1] - profile[i]));

    // Every step of maximal magnitude is a candidate edge; ties go to the smaller distance.
    for (int i = 0; i + 1 < n; ++i) {
        if (std::abs(profile[i + 1] - profile[i]) != steepest) continue;
        const double dir = profile[i + 1] > profile[i] ? 1.0 : -1.0;
        // Walk from the upper end of the step uphill, from the lower end downhill.
        int hi = dir > 0 ? i + 1 : i;
        int lo = dir > 0 ? i : i + 1;
        const int hi_step = dir > 0 ? 1 : -1;
        const int lo_step = -hi_step;
        while (hi + hi_step >= 0 && hi + hi_step < n && profile[hi + hi_step] - profile[hi] > tol) hi += hi_step;
        while (lo + lo_step >= 0 && lo + lo_step < n && profile[lo] - profile[lo + lo_step] > tol) lo += lo_step;
        const bool interior = hi + hi_step >= 0 && hi + hi_step < n && lo + lo_step >= 0 && lo + lo_step < n;
        if (!interior) continue;
        const double dist = std::abs(hi - lo) * step_mm;
        if (!best.distance_mm || dist < *best.distance_mm) {
            best.distance_mm = dist;
            best.high_index = hi;
            best.low_index = lo;
            const double contrast = profile[hi] - profile[lo];
            double outside = 0.0;
            for (int j = 0; j + 1 < n; ++j)
                if (j + 1 <= std::min(hi, lo) || j >= std::max(hi, lo))
                    outside = std::max(outside, std::abs(profile[j + 1] - profile[j]));
            best.reliable = contrast >= kReliableContrast * range && outside <= kIsolatedStep * contrast;
        }
    }
    return best;
}

std::vector<Sharpness> feature_sharpness(const HyperCube& cube, const CrossSection& section) {
    const double step = section.axis == CrossSection::Axis::Row ? cube.step_x() : cube.step_y();
    std::vector<Sharpness> out;
    for (int b = 0; b < cube.bands(); ++b) out.push_back(profile_sharpness(extract_profile(cube.band_image(b), section), step));
    return out;
}

MsePsnr mse_psnr(const HyperCube& cube, const HyperCube& reference) {
    if (cube.bands() != reference.bands() || cube.ny() != reference.ny() || cube.nx() != reference.nx())
        fail(ErrorKind::Validation, "cubes differ in shape");
    const double peak = *std::max_element(reference.data().begin(), reference.data().end());
    auto psnr_of = [peak](double mse) {
        if (mse == 0.0) return std::numeric_limits<double>::infinity();
        return 10.0 * std::log10(peak * peak / mse);
    };
    MsePsnr out;
    double total = 0.0;
    for (int b = 0; b < cube.bands(); ++b) {
        const auto x = cube.band(b);
        const auto r = reference.band(b);
        double ss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) ss += (x[i] - r[i]) * (x[i] - r[i]);
        total += ss;
        const double mse = ss / static_cast<double>(x.size());
        out.per_band.push_back({mse, psnr_of(mse)});
    }
    out.aggregate.mse = total / static_cast<double>(cube.data().size());
    out.aggregate.psnr = psnr_of(out.aggregate.mse);
    return out;
}

double capped_psnr(double psnr) { return std::min(psnr, kPsnrCap); }

namespace {

std::vector<int> bands_in(const HyperCube& cube, double f_lo, double f_hi) {
    if (!(f_hi >= f_lo)) fail(ErrorKind::Validation, "frequency range is reversed");
    std::vector<int> idx;
    for (int b = 0; b < cube.bands(); ++b) {
        const double f = cube.frequencies()[b];
        if (f >= f_lo && f <= f_hi) idx.push_back(b);
    }
    if (idx.empty()) fail(ErrorKind::Validation, "frequency range contains no bands");
    return idx;
}

} // namespace

Image integrate_range_raw(const HyperCube& cube, double f_lo, double f_hi) {
    const auto idx = bands_in(cube, f_lo, f_hi);
    Image out(cube.ny(), cube.nx());
    const auto& f = cube.frequencies();
    for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
        const double df = f[idx[k + 1]] - f[idx[k]];
        const auto a = cube.band(idx[k]);
        const auto b = cube.band(idx[k + 1]);
        for (std::size_t i = 0; i < out.size(); ++i) out.px[i] += 0.5 * df * (a[i] + b[i]);
    }
    return out;
}

Image integrate_range(const HyperCube& cube, double f_lo, double f_hi) {
    const auto idx = bands_in(cube, f_lo, f_hi);
    if (idx.size() == 1) return cube.band_image(idx.front());
    Image out = integrate_range_raw(cube, f_lo, f_hi);
    const double width = cube.frequencies()[idx.back()] - cube.frequencies()[idx.front()];
    for (double& v : out.px) v /= width;
    return out;
}

std::vector<std::uint8_t> RgbImage::channel(int c) const {
    std::vector<std::uint8_t> out(static_cast<std::size_t>(width) * height);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = rgb[3 * i + c];
    return out;
}

RgbImage false_color(const HyperCube& cube, const FalseColorRanges& ranges) {
    RgbImage img;
    img.width = cube.nx();
    img.height = cube.ny();
    img.rgb.assign(static_cast<std::size_t>(img.width) * img.height * 3, 0);
    const FrequencyRange* chans[3] = {&ranges.red, &ranges.green, &ranges.blue};
    for (int c = 0; c < 3; ++c) {
        const Image plane = integrate_range(cube, chans[c]->lo, chans[c]->hi);
        const double lo = min_value(plane), hi = max_value(plane);
        if (!(hi > lo)) continue;
        for (std::size_t i = 0; i < plane.size(); ++i) {
            const double t = (plane.px[i] - lo) / (hi - lo);
            img.rgb[3 * i + c] = static_cast<std::uint8_t>(std::min(255.0, std::floor(t * 255.0 + 0.5)));
        }
    }
    return img;
}

double ssim(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
    if (a.size() != b.size() || a.empty()) fail(ErrorKind::Validation, "SSIM inputs must be equally sized");
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double va = 0.0, vb = 0.0, cov = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
        cov += (a[i] - ma) * (b[i] - mb);
    }
    va /= n - 1.0;
    vb /= n - 1.0;
    cov /= n - 1.0;
    const double c1 = (0.01 * 255.0) * (0.01 * 255.0);
    const double c2 = (0.03 * 255.0) * (0.03 * 255.0);
    return ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
}

std::optional<double> rise_distance(const std::vector<double>& profile) {
    if (profile.size() < 2) return std::nullopt;
    std::vector<double> p = profile;
    if (p.front() > p.back()) std::reverse(p.begin(), p.end());
    const auto [mn, mx] = std::minmax_element(p.begin(), p.end());
    const double range = *mx - *mn;
    if (!(range > 0.0)) return std::nullopt;
    auto crossing = [&](double level) -> std::optional<double> {
        for (std::size_t i = 0; i + 1 < p.size(); ++i)
            if (p[i] < level && p[i + 1] >= level) return static_cast<double>(i) + (level - p[i]) / (p[i + 1] - p[i]);
        return std::nullopt;
    };
    const auto x10 = crossing(*mn + 0.1 * range);
    const auto x90 = crossing(*mn + 0.9 * range);
    if (!x10 || !x90) return std::nullopt;
    return std::abs(*x90 - *x10);
}

} // namespace thz::metrics
