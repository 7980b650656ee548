#include "thz/forward_model.hpp"

#include <cmath>

#include "thz/convolution.hpp"
#include "thz/error.hpp"
#include "thz/parallel.hpp"
#include "thz/rng.hpp"

namespace thz::forward {

std::string to_string(PhantomKind kind) {
    switch (kind) {
    case PhantomKind::DiskHole: return "disk_hole";
    case PhantomKind::Rings: return "rings";
    case PhantomKind::Bars: return "bars";
    }
    return "unknown";
}

PhantomKind phantom_kind_from_string(const std::string& name) {
    if (name == "disk_hole") return PhantomKind::DiskHole;
    if (name == "rings") return PhantomKind::Rings;
    if (name == "bars") return PhantomKind::Bars;
    fail(ErrorKind::Configuration, "unknown phantom kind: " + name);
}

std::string to_string(NoiseModel::Variant v) {
    switch (v) {
    case NoiseModel::Variant::GaussianIid: return "gaussian_iid";
    case NoiseModel::Variant::GaussianNonIid: return "gaussian_noniid";
    case NoiseModel::Variant::Poisson: return "poisson";
    }
    return "unknown";
}

double Amplitude::at(double f, double f_min, double f_max) const {
    if (f_max <= f_min) return at_low;
    return at_low + (at_high - at_low) * (f - f_min) / (f_max - f_min);
}

void PhantomSpec::validate() const {
    if (ny < 16 || nx < 16) fail(ErrorKind::Validation, "phantom dimensions must be at least 16");
    if (!(step > 0.0)) fail(ErrorKind::Validation, "phantom step must be positive");
    if (radius_px < 0.0) fail(ErrorKind::Validation, "radius must be non-negative");
    if (!(feature_width_px > 0.0)) fail(ErrorKind::Validation, "feature width must be positive");
    validate_geometry(CubeGeometry{ny, nx, step, step, frequencies});
}

std::vector<double> linear_frequencies(double f_lo, double f_hi, int bands) {
    if (bands < 1) fail(ErrorKind::Configuration, "band count must be positive");
    std::vector<double> f(bands);
    for (int i = 0; i < bands; ++i) f[i] = bands == 1 ? f_lo : f_lo + (f_hi - f_lo) * i / (bands - 1);
    return f;
}

Image phantom_mask(const PhantomSpec& spec) {
    spec.validate();
    Image mask(spec.ny, spec.nx);
    const double radius = spec.radius_px > 0.0 ? spec.radius_px : std::min(spec.ny, spec.nx) / 4.0;
    const double cy = (spec.ny - 1) / 2.0;
    const double cx = (spec.nx - 1) / 2.0;
    for (int y = 0; y < spec.ny; ++y)
        for (int x = 0; x < spec.nx; ++x) {
            const double r = std::hypot(y - cy, x - cx);
            bool fg = false;
            switch (spec.kind) {
            case PhantomKind::DiskHole: fg = (y - cy) * (y - cy) + (x - cx) * (x - cx) <= radius * radius; break;
            case PhantomKind::Rings:
                fg = r <= radius && static_cast<long>(std::floor(r / spec.feature_width_px)) % 2 == 0;
                break;
            case PhantomKind::Bars: fg = static_cast<long>(std::floor(x / spec.feature_width_px)) % 2 == 0; break;
            }
            mask(y, x) = fg ? 1.0 : 0.0;
        }
    return mask;
}

HyperCube generate_phantom(const PhantomSpec& spec) {
    const Image mask = phantom_mask(spec);
    const auto& f = spec.frequencies;
    const double f_min = f.front(), f_max = f.back();
    std::vector<double> data;
    data.reserve(f.size() * mask.size());
    for (double freq : f) {
        const double bg = spec.background.at(freq, f_min, f_max);
        const double fg = spec.foreground.at(freq, f_min, f_max);
        for (double m : mask.px) data.push_back(m > 0.0 ? fg : bg);
    }
    return HyperCube(CubeGeometry{spec.ny, spec.nx, spec.step, spec.step, f}, std::move(data));
}

NoiseModel NoiseModel::gaussian_iid(double sigma, std::uint64_t seed) {
    NoiseModel m;
    m.variant = Variant::GaussianIid;
    m.sigma = sigma;
    m.seed = seed;
    return m;
}

NoiseModel NoiseModel::gaussian_noniid(std::vector<double> sigmas, std::uint64_t seed) {
    NoiseModel m;
    m.variant = Variant::GaussianNonIid;
    m.sigma_per_band = std::move(sigmas);
    m.seed = seed;
    return m;
}

NoiseModel NoiseModel::poisson(double gain, std::uint64_t seed) {
    NoiseModel m;
    m.variant = Variant::Poisson;
    m.gain = gain;
    m.seed = seed;
    return m;
}

void NoiseModel::validate(int bands) const {
    switch (variant) {
    case Variant::GaussianIid:
        if (!(sigma >= 0.0) || !std::isfinite(sigma)) fail(ErrorKind::Validation, "sigma must be non-negative");
        break;
    case Variant::GaussianNonIid:
        if (static_cast<int>(sigma_per_band.size()) != bands)
            fail(ErrorKind::Validation, "sigma_per_band length must equal the band count");
        for (double s : sigma_per_band)
            if (!(s >= 0.0) || !std::isfinite(s)) fail(ErrorKind::Validation, "band sigmas must be non-negative");
        break;
    case Variant::Poisson:
        if (!(gain > 0.0) || !std::isfinite(gain)) fail(ErrorKind::Validation, "Poisson gain must be positive");
        break;
    }
}

HyperCube blur_cube(const HyperCube& cube, const beam::BeamGeometry& geom, double z, unsigned workers,
                    double truncation) {
    geom.validate();
    if (cube.step_x() != cube.step_y())
        fail(ErrorKind::Configuration, "anisotropic pixel steps are not supported by the beam PSF");
    const std::size_t n = cube.pixels();
    std::vector<beam::Psf> psfs;
    for (double f : cube.frequencies()) psfs.push_back(beam::synthesize_psf(f, geom, cube.step_x(), z, truncation));
    std::vector<double> out(cube.data().size());
    parallel_for(static_cast<std::size_t>(cube.bands()), workers, [&](std::size_t b) {
        const Image blurred = convolve_reflective(cube.band_image(static_cast<int>(b)), psfs[b]);
        std::copy(blurred.px.begin(), blurred.px.end(), out.begin() + static_cast<std::ptrdiff_t>(b * n));
    });
    return cube.with_data(std::move(out));
}

HyperCube add_noise(const HyperCube& cube, const NoiseModel& model, unsigned workers) {
    model.validate(cube.bands());
    const std::size_t n = cube.pixels();
    // Negative values within roundoff of zero (e.g. from FFT blurring) are treated as zero.
    double roundoff = 0.0;
    if (model.variant == NoiseModel::Variant::Poisson) {
        for (double v : cube.data()) roundoff = std::max(roundoff, std::abs(v));
        roundoff *= 1e-9;
        for (double v : cube.data())
            if (v < -roundoff) fail(ErrorKind::Domain, "Poisson noise requires non-negative amplitudes");
    }
    std::vector<double> out(cube.data().begin(), cube.data().end());
    parallel_for(static_cast<std::size_t>(cube.bands()), workers, [&](std::size_t b) {
        Xoshiro256 rng(model.seed ^ static_cast<std::uint64_t>(b));
        double* band = out.data() + b * n;
        switch (model.variant) {
        case NoiseModel::Variant::GaussianIid:
        case NoiseModel::Variant::GaussianNonIid: {
            const double s = model.variant == NoiseModel::Variant::GaussianIid ? model.sigma : model.sigma_per_band[b];
            if (s == 0.0) return;
            for (std::size_t i = 0; i < n; ++i) band[i] += s * rng.normal();
            break;
        }
        case NoiseModel::Variant::Poisson:
            for (std::size_t i = 0; i < n; ++i)
                band[i] = static_cast<double>(rng.poisson(std::max(band[i], 0.0) / model.gain)) * model.gain;
            break;
        }
    });
    return cube.with_data(std::move(out));
}

Simulation simulate(const PhantomSpec& spec, const beam::BeamGeometry& geom, const NoiseModel& model, double z,
                    unsigned workers) {
    HyperCube clean = generate_phantom(spec);
    HyperCube degraded = add_noise(blur_cube(clean, geom, z, workers), model, workers);
    return {std::move(clean), std::move(degraded)};
}

} // namespace thz::forward
