#include "thz/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "thz/error.hpp"
#include "thz/rng.hpp"

namespace thz::pipeline {

std::string to_string(NoiseType t) {
    switch (t) {
    case NoiseType::Iid: return "iid";
    case NoiseType::NonIid: return "noniid";
    case NoiseType::Poisson: return "poisson";
    }
    return "unknown";
}

NoiseType noise_type_from_string(const std::string& name) {
    if (name == "iid") return NoiseType::Iid;
    if (name == "noniid") return NoiseType::NonIid;
    if (name == "poisson") return NoiseType::Poisson;
    fail(ErrorKind::Configuration, "unknown noise type: " + name);
}

double anscombe(double x) { return 2.0 * std::sqrt(std::max(x, 0.0) + 0.375); }

double inverse_anscombe(double z) {
    const double z_min = anscombe(0.0);
    if (z <= z_min) return 0.0;
    const double s = std::sqrt(1.5);
    const double v = 0.25 * z * z + 0.25 * s / z - 1.375 / (z * z) + 0.625 * s / (z * z * z) - 0.125;
    return std::max(v, 0.0);
}

namespace {

class StageTimer {
public:
    explicit StageTimer(RestorationReport& report) : report_(report), start_(Clock::now()) {}
    void mark(const std::string& stage) {
        const auto now = Clock::now();
        report_.timings.emplace_back(stage, std::chrono::duration<double>(now - start_).count());
        start_ = now;
    }

private:
    using Clock = std::chrono::steady_clock;
    RestorationReport& report_;
    Clock::time_point start_;
};

struct Prepared {
    std::vector<double> whitening; // D_i
    subspace::SubspaceBasis basis;
    subspace::EigenImageSet eigen;
    std::vector<double> component_sigma;
};

void validate_config(const HyperCube& cube, const RestorationConfig& config) {
    if (cube.bands() < 3) fail(ErrorKind::Validation, "restoration needs at least 3 bands");
    if (config.p && (*config.p < 1 || *config.p > cube.bands()))
        fail(ErrorKind::Configuration, "subspace dimension must be in [1, b]");
    if (config.noise_type == NoiseType::Poisson && !(config.poisson_gain > 0.0))
        fail(ErrorKind::Configuration, "Poisson gain must be positive");
    config.deblur.validate();
    config.psf_geometry.validate();
}

HyperCube stabilize(const HyperCube& cube, const RestorationConfig& config) {
    if (config.noise_type != NoiseType::Poisson) return cube;
    std::vector<double> z(cube.data().size());
    std::transform(cube.data().begin(), cube.data().end(), z.begin(),
                   [g = config.poisson_gain](double v) { return anscombe(v / g); });
    return cube.with_data(std::move(z));
}

HyperCube destabilize(const HyperCube& cube, const RestorationConfig& config) {
    if (config.noise_type != NoiseType::Poisson) return cube;
    std::vector<double> x(cube.data().size());
    std::transform(cube.data().begin(), cube.data().end(), x.begin(),
                   [g = config.poisson_gain](double v) { return g * inverse_anscombe(v); });
    return cube.with_data(std::move(x));
}

Prepared prepare(const HyperCube& stabilized, const RestorationConfig& config, RestorationReport& report,
                 StageTimer& timer) {
    const int b = stabilized.bands();
    const auto noise = subspace::estimate_noise(stabilized);
    report.noise_sigma_per_band = noise.sigma_per_band;
    timer.mark("estimate_noise");

    double ss = 0.0;
    for (double v : stabilized.data()) ss += v * v;
    const double rms = std::sqrt(ss / static_cast<double>(stabilized.data().size()));
    const double floor = rms > 0.0 ? 1e-9 * rms : 1.0;

    Prepared prep;
    prep.whitening.resize(b);
    if (config.noise_type == NoiseType::NonIid) {
        for (int i = 0; i < b; ++i) prep.whitening[i] = std::max(noise.sigma_per_band[i], floor);
    } else {
        double s2 = 0.0;
        for (double s : noise.sigma_per_band) s2 += s * s;
        const double common = std::max(std::sqrt(s2 / b), floor);
        std::fill(prep.whitening.begin(), prep.whitening.end(), common);
    }

    const std::size_t n = stabilized.pixels();
    std::vector<double> whitened(stabilized.data().begin(), stabilized.data().end());
    subspace::NoiseEstimate whitened_noise;
    whitened_noise.sigma_per_band.resize(b);
    for (int i = 0; i < b; ++i) {
        const double inv = 1.0 / prep.whitening[i];
        for (std::size_t j = 0; j < n; ++j) whitened[static_cast<std::size_t>(i) * n + j] *= inv;
        whitened_noise.sigma_per_band[i] = noise.sigma_per_band[i] * inv;
    }
    const HyperCube yw = stabilized.with_data(std::move(whitened));
    timer.mark("whiten");

    prep.basis = subspace::learn_subspace(yw, config.p, whitened_noise);
    report.p = prep.basis.p();
    timer.mark("learn_subspace");
    prep.eigen = subspace::project(yw, prep.basis);
    timer.mark("project");

    prep.component_sigma.resize(prep.basis.p());
    for (int k = 0; k < prep.basis.p(); ++k) {
        double v = 0.0;
        for (int j = 0; j < b; ++j) {
            const double e = prep.basis.E(j, k);
            v += e * e * whitened_noise.sigma_per_band[j] * whitened_noise.sigma_per_band[j];
        }
        prep.component_sigma[k] = std::sqrt(v);
    }
    return prep;
}

HyperCube finish(const Prepared& prep, const subspace::EigenImageSet& eigen, const HyperCube& stabilized,
                 const RestorationConfig& config, StageTimer& timer) {
    const HyperCube xw = subspace::reconstruct(prep.basis, eigen);
    const std::size_t n = xw.pixels();
    std::vector<double> data(xw.data().begin(), xw.data().end());
    for (int i = 0; i < xw.bands(); ++i)
        for (std::size_t j = 0; j < n; ++j) data[static_cast<std::size_t>(i) * n + j] *= prep.whitening[i];
    HyperCube out = destabilize(stabilized.with_data(std::move(data)), config);
    timer.mark("reconstruct");
    return out;
}

// Noise level of each deblurred eigen-image: a seeded N(0, sigma_k^2) field is
// added to the input and pushed through the same solver; the RMS change of the
// output is the propagated level. Delta PSFs keep sigma_k.
std::vector<double> propagated_noise(const subspace::EigenImageSet& eigen, const subspace::EigenImageSet& deblurred,
                                     const std::vector<beam::Psf>& psfs, const deblur::DeblurMethod& method,
                                     const std::vector<double>& sigmas, unsigned workers) {
    subspace::EigenImageSet perturbed = eigen;
    for (int k = 0; k < eigen.p(); ++k) {
        if (psfs[k].is_delta() || sigmas[k] <= 0.0) continue;
        Xoshiro256 rng(kPropagationSeed ^ static_cast<std::uint64_t>(k));
        for (Eigen::Index j = 0; j < perturbed.A.cols(); ++j) perturbed.A(k, j) += sigmas[k] * rng.normal();
    }
    const auto response = deblur::deblur_eigen_images(perturbed, psfs, method, sigmas, workers);
    std::vector<double> out(sigmas);
    for (int k = 0; k < eigen.p(); ++k) {
        if (psfs[k].is_delta() || sigmas[k] <= 0.0) continue;
        out[k] = std::sqrt((response.A.row(k) - deblurred.A.row(k)).squaredNorm() / static_cast<double>(eigen.A.cols()));
    }
    return out;
}

} // namespace

RestorationResult fasthyde_detailed(const HyperCube& cube, const RestorationConfig& config) {
    validate_config(cube, config);
    RestorationReport report;
    StageTimer timer(report);
    const HyperCube z = stabilize(cube, config);
    Prepared prep = prepare(z, config, report, timer);

    const auto infos = subspace::component_report(prep.basis, prep.eigen, cube.frequencies());
    for (int k = 0; k < prep.basis.p(); ++k)
        report.components.push_back({infos[k], 0.0, prep.component_sigma[k], prep.component_sigma[k], false});

    const auto denoised = denoise::denoise_eigen_images(prep.eigen, prep.component_sigma, config.denoise_params,
                                                        config.workers);
    timer.mark("denoise");
    HyperCube out = finish(prep, denoised, z, config, timer);
    return {std::move(out), std::move(report)};
}

HyperCube fasthyde(const HyperCube& cube, const RestorationConfig& config) {
    return fasthyde_detailed(cube, config).cube;
}

SubspaceAnalysis analyze(const HyperCube& cube, const RestorationConfig& config) {
    validate_config(cube, config);
    RestorationReport report;
    StageTimer timer(report);
    const HyperCube z = stabilize(cube, config);
    Prepared prep = prepare(z, config, report, timer);
    const auto infos = subspace::component_report(prep.basis, prep.eigen, cube.frequencies());
    for (int k = 0; k < prep.basis.p(); ++k) {
        const double w0 =
            beam::beam_waist(beam::wavelength_from_frequency(infos[k].effective_frequency), config.psf_geometry);
        report.components.push_back({infos[k], w0, prep.component_sigma[k], prep.component_sigma[k], false});
    }
    timer.mark("analyse");
    return {std::move(prep.basis), std::move(prep.eigen), std::move(report)};
}

RestorationResult joint_restore_detailed(const HyperCube& cube, const RestorationConfig& config) {
    validate_config(cube, config);
    if (cube.step_x() != cube.step_y())
        fail(ErrorKind::Configuration, "anisotropic pixel steps are not supported by the beam PSF");
    RestorationReport report;
    StageTimer timer(report);
    const HyperCube z = stabilize(cube, config);
    Prepared prep = prepare(z, config, report, timer);
    const int p = prep.basis.p();

    for (int d : config.components_to_discard)
        if (d < 0 || d >= p) fail(ErrorKind::Configuration, "discarded component index out of range");
    std::vector<bool> discard(p, false);
    for (int d : config.components_to_discard) discard[d] = true;
    if (std::all_of(discard.begin(), discard.end(), [](bool v) { return v; }))
        fail(ErrorKind::Configuration, "cannot discard every subspace component");
    if (config.psf_scale_mode == PsfScaleMode::Manual && static_cast<int>(config.manual_w0.size()) != p)
        fail(ErrorKind::Configuration, "manual PSF list must have one waist per component (p = " +
                                           std::to_string(p) + ")");

    const auto infos = subspace::component_report(prep.basis, prep.eigen, cube.frequencies());
    std::vector<beam::Psf> psfs;
    for (int k = 0; k < p; ++k) {
        double w0 = 0.0;
        if (config.psf_scale_mode == PsfScaleMode::Manual) {
            w0 = config.manual_w0[k];
            if (!(w0 >= 0.0)) fail(ErrorKind::Configuration, "manual beam waists must be non-negative");
        } else {
            w0 = beam::beam_waist(beam::wavelength_from_frequency(infos[k].effective_frequency), config.psf_geometry);
        }
        psfs.push_back(beam::gaussian_psf(w0, cube.step_x(), config.psf_truncation));
        report.components.push_back({infos[k], w0, prep.component_sigma[k], prep.component_sigma[k], discard[k]});
    }
    timer.mark("analyse");

    auto eigen = deblur::deblur_eigen_images(prep.eigen, psfs, config.deblur, prep.component_sigma, config.workers);
    const auto sigma_after =
        propagated_noise(prep.eigen, eigen, psfs, config.deblur, prep.component_sigma, config.workers);
    for (int k = 0; k < p; ++k) report.components[k].denoise_sigma = sigma_after[k];
    timer.mark("deblur");
    eigen = denoise::denoise_eigen_images(eigen, sigma_after, config.denoise_params, config.workers);
    timer.mark("denoise");
    for (int k = 0; k < p; ++k)
        if (discard[k]) eigen.A.row(k).setZero();

    HyperCube out = finish(prep, eigen, z, config, timer);
    return {std::move(out), std::move(report)};
}

HyperCube joint_restore(const HyperCube& cube, const RestorationConfig& config) {
    return joint_restore_detailed(cube, config).cube;
}

} // namespace thz::pipeline
