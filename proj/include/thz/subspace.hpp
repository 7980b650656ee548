#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "thz/hypercube.hpp"

namespace thz::subspace {

using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct NoiseEstimate {
    std::vector<double> sigma_per_band;
};

/// Orthonormal basis E (b x p) of the signal subspace.
struct SubspaceBasis {
    Matrix E;
    /// Eigenvalues (descending) of the whitened band correlation matrix; size b.
    std::vector<double> eigenvalues;
    /// Noise floor used for automatic dimension selection.
    double noise_floor = 0.0;

    int bands() const { return static_cast<int>(E.rows()); }
    int p() const { return static_cast<int>(E.cols()); }
};

/// Coefficients A (p x n) of a cube in a subspace; row k is eigen-image k.
struct EigenImageSet {
    RowMatrix A;
    CubeGeometry geometry;

    int p() const { return static_cast<int>(A.rows()); }
    Image image(int k) const;
    void set_image(int k, const Image& img);
};

/// Relative margin over the noise floor used by automatic dimension selection.
inline constexpr double kAutoMargin = 0.05;

/// Eigenvalues below this fraction of the largest are eigen-solver round-off,
/// not signal, and never count towards the automatic dimension.
inline constexpr double kNumericalRank = 1e-12;

/// Gram matrix Y Y^T / n of the cube's band vectors.
Matrix band_correlation(const HyperCube& cube);

/// Per-band noise level: RMS residual of regressing band i on all other bands.
NoiseEstimate estimate_noise(const HyperCube& cube);

/// Learns the signal subspace. With `p` empty, the dimension is the number of
/// whitened-correlation eigenvalues above (1 + kAutoMargin) times the noise floor
/// (1 + sqrt(b/n))^2 (and above kNumericalRank times the largest), clamped to [1, b].
SubspaceBasis learn_subspace(const HyperCube& cube, std::optional<int> p, const NoiseEstimate& noise);

EigenImageSet project(const HyperCube& cube, const SubspaceBasis& basis);
HyperCube reconstruct(const SubspaceBasis& basis, const EigenImageSet& eigen);

struct ComponentInfo {
    int index = 0;
    double energy_fraction = 0.0;
    double effective_frequency = 0.0; ///< THz
    double edge_score = 0.0;
};

/// Per-component energy fraction, spectral centroid of the basis column and
/// mean gradient magnitude of the eigen-image relative to its standard deviation.
std::vector<ComponentInfo> component_report(const SubspaceBasis& basis, const EigenImageSet& eigen,
                                            const std::vector<double>& frequencies);

/// Mean forward-difference gradient magnitude over std; 0 for a constant image.
double edge_score(const Image& img);

/// Flips column signs so each column's largest-magnitude entry is non-negative.
void apply_sign_convention(Matrix& E);

} // namespace thz::subspace
