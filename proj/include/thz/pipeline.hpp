#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "thz/beam.hpp"
#include "thz/deblur.hpp"
#include "thz/denoise.hpp"
#include "thz/hypercube.hpp"
#include "thz/subspace.hpp"

namespace thz::pipeline {

enum class NoiseType { Iid, NonIid, Poisson };
enum class PsfScaleMode { EffectiveFrequency, Manual };

std::string to_string(NoiseType t);
NoiseType noise_type_from_string(const std::string& name);

/// Seed of the noise field used to measure how deblurring scales eigen-image noise.
inline constexpr std::uint64_t kPropagationSeed = 0x7468'7a70'726f'7061ULL;

struct RestorationConfig {
    std::optional<int> p;                 ///< empty = automatic
    NoiseType noise_type = NoiseType::Iid;
    double poisson_gain = 1.0;            ///< scale of the Poisson counts (Anscombe path)
    deblur::DeblurMethod deblur = deblur::DeblurMethod::richardson_lucy();
    beam::BeamGeometry psf_geometry;
    PsfScaleMode psf_scale_mode = PsfScaleMode::EffectiveFrequency;
    std::vector<double> manual_w0;        ///< mm per component; 0 = no deblurring for that component
    std::vector<int> components_to_discard;
    denoise::PatchDenoiseParams denoise_params;
    double psf_truncation = beam::kDefaultTruncation;
    unsigned workers = 0;
};

struct ComponentSummary {
    subspace::ComponentInfo info;
    double w0 = 0.0;          ///< mm; 0 when not deblurred
    double noise_sigma = 0.0;   ///< whitened noise level of the eigen-image
    double denoise_sigma = 0.0; ///< level handed to the denoiser (after deblurring, if any)
    bool discarded = false;
};

struct RestorationReport {
    int p = 0;
    std::vector<double> noise_sigma_per_band;
    std::vector<ComponentSummary> components;
    std::vector<std::pair<std::string, double>> timings; ///< stage name, seconds
};

struct RestorationResult {
    HyperCube cube;
    RestorationReport report;
};

/// Subspace denoising only: estimate noise, whiten, learn subspace, project,
/// denoise eigen-images, reconstruct, unwhiten.
RestorationResult fasthyde_detailed(const HyperCube& cube, const RestorationConfig& config);
HyperCube fasthyde(const HyperCube& cube, const RestorationConfig& config);

struct SubspaceAnalysis {
    subspace::SubspaceBasis basis;
    subspace::EigenImageSet eigen; ///< whitened eigen-images
    RestorationReport report;      ///< w0 holds the beam waist at each effective frequency
};

/// Runs the restoration front end (stabilize, whiten, learn, project) and reports the components.
SubspaceAnalysis analyze(const HyperCube& cube, const RestorationConfig& config);

/// Joint deblurring and denoising: fasthyde with per-component PSF deconvolution
/// of the eigen-images before denoising, and optional component discarding.
RestorationResult joint_restore_detailed(const HyperCube& cube, const RestorationConfig& config);
HyperCube joint_restore(const HyperCube& cube, const RestorationConfig& config);

/// 2 sqrt(x + 3/8).
double anscombe(double x);
/// Closed-form approximation of the exact unbiased inverse (Makitalo & Foi).
double inverse_anscombe(double z);

} // namespace thz::pipeline
