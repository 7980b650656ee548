#include "thz/subspace.hpp"

#include <algorithm>
#include <cmath>

#include "thz/error.hpp"

namespace thz::subspace {

namespace {

Eigen::Map<const RowMatrix> as_matrix(const HyperCube& cube) {
    return {cube.data().data(), cube.bands(), static_cast<Eigen::Index>(cube.pixels())};
}

double whitening_floor(const HyperCube& cube) {
    double ss = 0.0;
    for (double v : cube.data()) ss += v * v;
    const double rms = std::sqrt(ss / static_cast<double>(cube.data().size()));
    return rms > 0.0 ? 1e-9 * rms : 1.0;
}

} // namespace

Image EigenImageSet::image(int k) const {
    Image img(geometry.ny, geometry.nx);
    for (std::size_t i = 0; i < img.size(); ++i) img.px[i] = A(k, static_cast<Eigen::Index>(i));
    return img;
}

void EigenImageSet::set_image(int k, const Image& img) {
    if (img.ny != geometry.ny || img.nx != geometry.nx) fail(ErrorKind::Validation, "eigen-image shape mismatch");
    for (std::size_t i = 0; i < img.size(); ++i) A(k, static_cast<Eigen::Index>(i)) = img.px[i];
}

Matrix band_correlation(const HyperCube& cube) {
    const auto Y = as_matrix(cube);
    Matrix R = Y * Y.transpose();
    return R / static_cast<double>(cube.pixels());
}

NoiseEstimate estimate_noise(const HyperCube& cube) {
    const int b = cube.bands();
    if (b < 3) fail(ErrorKind::Validation, "noise estimation needs at least 3 bands");
    const auto Y = as_matrix(cube);
    const Matrix G = Y * Y.transpose();
    const auto n = static_cast<double>(cube.pixels());

    NoiseEstimate est;
    est.sigma_per_band.resize(b);
    std::vector<int> others;
    for (int i = 0; i < b; ++i) {
        others.clear();
        for (int j = 0; j < b; ++j)
            if (j != i) others.push_back(j);
        const int m = b - 1;
        Matrix Goo(m, m);
        Eigen::VectorXd goi(m);
        for (int r = 0; r < m; ++r) {
            goi(r) = G(others[r], i);
            for (int c = 0; c < m; ++c) Goo(r, c) = G(others[r], others[c]);
        }
        // Minimum-norm least squares through a thresholded eigen pseudo-inverse so
        // exactly dependent bands (rank-deficient Gram) are handled without bias.
        Eigen::SelfAdjointEigenSolver<Matrix> es(Goo);
        const auto& ev = es.eigenvalues();
        const double cutoff = 1e-12 * std::max(ev.maxCoeff(), 0.0);
        Eigen::VectorXd proj = es.eigenvectors().transpose() * goi;
        int rank = 0;
        for (int k = 0; k < m; ++k) {
            if (ev(k) > cutoff && ev(k) > 0.0) {
                proj(k) /= ev(k);
                ++rank;
            } else {
                proj(k) = 0.0;
            }
        }
        const Eigen::VectorXd beta = es.eigenvectors() * proj;

        Eigen::RowVectorXd residual = Y.row(i);
        for (int r = 0; r < m; ++r) residual -= beta(r) * Y.row(others[r]);
        const double dof = std::max(1.0, n - rank);
        est.sigma_per_band[i] = std::sqrt(residual.squaredNorm() / dof);
    }
    return est;
}

void apply_sign_convention(Matrix& E) {
    for (Eigen::Index c = 0; c < E.cols(); ++c) {
        Eigen::Index arg = 0;
        double best = -1.0;
        for (Eigen::Index r = 0; r < E.rows(); ++r)
            if (std::abs(E(r, c)) > best) {
                best = std::abs(E(r, c));
                arg = r;
            }
        if (E(arg, c) < 0.0) E.col(c) *= -1.0;
    }
}

SubspaceBasis learn_subspace(const HyperCube& cube, std::optional<int> p, const NoiseEstimate& noise) {
    const int b = cube.bands();
    if (static_cast<int>(noise.sigma_per_band.size()) != b)
        fail(ErrorKind::Validation, "noise estimate length does not match band count");
    if (p && (*p < 1 || *p > b)) fail(ErrorKind::Configuration, "subspace dimension must be in [1, b]");

    const double floor = whitening_floor(cube);
    Eigen::VectorXd d(b);
    for (int i = 0; i < b; ++i) d(i) = std::max(noise.sigma_per_band[i], floor);

    const Matrix R = band_correlation(cube);
    const Matrix Rw = d.cwiseInverse().asDiagonal() * R * d.cwiseInverse().asDiagonal();
    Eigen::SelfAdjointEigenSolver<Matrix> es(Rw);
    // Eigen returns ascending order; reverse to descending.
    std::vector<double> mu(b);
    Matrix V(b, b);
    for (int k = 0; k < b; ++k) {
        mu[k] = es.eigenvalues()(b - 1 - k);
        V.col(k) = es.eigenvectors().col(b - 1 - k);
    }

    SubspaceBasis basis;
    basis.eigenvalues = mu;
    const double ratio = std::sqrt(static_cast<double>(b) / static_cast<double>(cube.pixels()));
    basis.noise_floor = (1.0 + ratio) * (1.0 + ratio);
    int dim = 0;
    if (p) {
        dim = *p;
    } else {
        const double top = mu.empty() ? 0.0 : std::max(mu.front(), 0.0);
        const double threshold = std::max((1.0 + kAutoMargin) * basis.noise_floor, kNumericalRank * top);
        for (double m : mu)
            if (m > threshold) ++dim;
        dim = std::clamp(dim, 1, b);
    }

    // Map the whitened eigenvectors back to band space and re-orthonormalize.
    const Matrix unwhitened = d.asDiagonal() * V.leftCols(dim);
    Eigen::HouseholderQR<Matrix> qr(unwhitened);
    Matrix Q = qr.householderQ() * Matrix::Identity(b, dim);
    apply_sign_convention(Q);
    basis.E = std::move(Q);
    return basis;
}

EigenImageSet project(const HyperCube& cube, const SubspaceBasis& basis) {
    if (basis.bands() != cube.bands()) fail(ErrorKind::Validation, "basis band count does not match cube");
    EigenImageSet out;
    out.geometry = cube.geometry();
    out.A = basis.E.transpose() * as_matrix(cube);
    return out;
}

HyperCube reconstruct(const SubspaceBasis& basis, const EigenImageSet& eigen) {
    if (basis.p() != eigen.p()) fail(ErrorKind::Validation, "basis dimension does not match eigen-images");
    if (basis.bands() != eigen.geometry.bands()) fail(ErrorKind::Validation, "basis band count mismatch");
    if (static_cast<std::size_t>(eigen.A.cols()) != eigen.geometry.pixels())
        fail(ErrorKind::Validation, "eigen-image size mismatch");
    RowMatrix X = basis.E * eigen.A;
    return HyperCube(eigen.geometry, std::vector<double>(X.data(), X.data() + X.size()));
}

double edge_score(const Image& img) {
    const double sd = std::sqrt(variance(img));
    if (!(sd > 0.0) || img.ny < 2 || img.nx < 2) return 0.0;
    double total = 0.0;
    std::size_t count = 0;
    for (int y = 0; y + 1 < img.ny; ++y)
        for (int x = 0; x + 1 < img.nx; ++x) {
            const double gx = img(y, x + 1) - img(y, x);
            const double gy = img(y + 1, x) - img(y, x);
            total += std::sqrt(gx * gx + gy * gy);
            ++count;
        }
    return total / static_cast<double>(count) / sd;
}

std::vector<ComponentInfo> component_report(const SubspaceBasis& basis, const EigenImageSet& eigen,
                                            const std::vector<double>& frequencies) {
    if (static_cast<int>(frequencies.size()) != basis.bands())
        fail(ErrorKind::Validation, "frequency axis length does not match basis");
    if (basis.p() != eigen.p()) fail(ErrorKind::Validation, "basis dimension does not match eigen-images");
    double total = 0.0;
    for (double m : basis.eigenvalues) total += std::max(m, 0.0);
    std::vector<ComponentInfo> out;
    for (int k = 0; k < basis.p(); ++k) {
        ComponentInfo info;
        info.index = k;
        info.energy_fraction =
            total > 0.0 && k < static_cast<int>(basis.eigenvalues.size()) ? std::max(basis.eigenvalues[k], 0.0) / total
                                                                           : 0.0;
        double num = 0.0, den = 0.0;
        for (int w = 0; w < basis.bands(); ++w) {
            const double e2 = basis.E(w, k) * basis.E(w, k);
            num += e2 * frequencies[w];
            den += e2;
        }
        info.effective_frequency = den > 0.0 ? num / den : 0.0;
        info.edge_score = edge_score(eigen.image(k));
        out.push_back(info);
    }
    return out;
}

} // namespace thz::subspace
