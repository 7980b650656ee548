#pragma once

// Test fixtures and independent oracles shared by the unit and acceptance suites.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "thz/beam.hpp"
#include "thz/forward_model.hpp"
#include "thz/hypercube.hpp"
#include "thz/image.hpp"

namespace thz::testing {

inline std::vector<double> axis(double lo, double hi, int n) {
    std::vector<double> f(n);
    for (int i = 0; i < n; ++i) f[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    return f;
}

inline CubeGeometry geometry(int bands, int ny, int nx, double step = 0.2, double f_lo = 0.4, double f_hi = 3.0) {
    return CubeGeometry{ny, nx, step, step, axis(f_lo, f_hi, bands)};
}

inline Image random_image(int ny, int nx, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    Image img(ny, nx);
    for (double& v : img.px) v = u(rng);
    return img;
}

inline HyperCube random_cube(int bands, int ny, int nx, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> data(static_cast<std::size_t>(bands) * ny * nx);
    for (double& v : data) v = u(rng);
    return HyperCube(geometry(bands, ny, nx), std::move(data));
}

/// b x p matrix with orthonormal columns (QR of a Gaussian matrix).
inline Eigen::MatrixXd random_orthonormal(int b, int p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::MatrixXd g(b, p);
    for (int i = 0; i < b; ++i)
        for (int j = 0; j < p; ++j) g(i, j) = n(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    return qr.householderQ() * Eigen::MatrixXd::Identity(b, p);
}

/// Three spatial maps with distinct structure: a disk, concentric rings, and bars.
inline std::vector<Image> structured_maps(int ny, int nx) {
    std::vector<Image> maps;
    for (auto kind : {forward::PhantomKind::DiskHole, forward::PhantomKind::Rings, forward::PhantomKind::Bars}) {
        forward::PhantomSpec spec;
        spec.kind = kind;
        spec.ny = ny;
        spec.nx = nx;
        spec.frequencies = {1.0};
        spec.radius_px = std::min(ny, nx) / 3.0;
        spec.feature_width_px = 5.0;
        maps.push_back(forward::phantom_mask(spec));
    }
    return maps;
}

/// Cube Y = E0 * A0 with the given spectra (b x p) and spatial maps (p images).
inline HyperCube cube_from_factors(const CubeGeometry& geom, const Eigen::MatrixXd& spectra,
                                   const std::vector<Image>& maps) {
    const std::size_t n = geom.pixels();
    std::vector<double> data(static_cast<std::size_t>(geom.bands()) * n, 0.0);
    for (int b = 0; b < geom.bands(); ++b)
        for (int k = 0; k < static_cast<int>(maps.size()); ++k)
            for (std::size_t j = 0; j < n; ++j) data[b * n + j] += spectra(b, k) * maps[k].px[j];
    return HyperCube(geom, std::move(data));
}

/// Rank-3 disk-based cube: disk / rings / bars maps under smooth positive spectra.
inline HyperCube rank3_disk_cube(int bands, int ny, int nx) {
    const auto geom = geometry(bands, ny, nx, 0.2, 0.4, 3.0);
    Eigen::MatrixXd spectra(bands, 3);
    for (int b = 0; b < bands; ++b) {
        const double t = bands == 1 ? 0.0 : static_cast<double>(b) / (bands - 1);
        spectra(b, 0) = 1.0 - 0.5 * t;
        spectra(b, 1) = 0.3 + 0.5 * t * t;
        spectra(b, 2) = 0.4 * std::exp(-std::pow((t - 0.5) / 0.25, 2));
    }
    return cube_from_factors(geom, spectra, structured_maps(ny, nx));
}

inline HyperCube add_gaussian(const HyperCube& cube, double sigma, std::uint64_t seed) {
    return forward::add_noise(cube, forward::NoiseModel::gaussian_iid(sigma, seed), 1);
}

inline double mse(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s / static_cast<double>(a.size());
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// Mirror index with the sample repeated at the boundary (period 2n).
inline int mirror(int i, int n) {
    const int period = 2 * n;
    int m = ((i % period) + period) % period;
    return m < n ? m : period - 1 - m;
}

/// Direct spatial-domain convolution with mirror boundaries.
inline Image direct_convolve(const Image& img, const beam::Psf& psf) {
    Image out(img.ny, img.nx);
    const int k = psf.half_width;
    for (int y = 0; y < img.ny; ++y)
        for (int x = 0; x < img.nx; ++x) {
            double acc = 0.0;
            for (int dy = -k; dy <= k; ++dy)
                for (int dx = -k; dx <= k; ++dx) acc += psf.at(dy, dx) * img(mirror(y - dy, img.ny), mirror(x - dx, img.nx));
            out(y, x) = acc;
        }
    return out;
}

/// Image translated by (dy, dx); vacated pixels take `fill`.
inline Image shifted(const Image& img, int dy, int dx, double fill) {
    Image out(img.ny, img.nx, fill);
    for (int y = 0; y < img.ny; ++y)
        for (int x = 0; x < img.nx; ++x) {
            const int sy = y - dy, sx = x - dx;
            if (sy >= 0 && sy < img.ny && sx >= 0 && sx < img.nx) out(y, x) = img(sy, sx);
        }
    return out;
}

/// Random texture in the central region, constant `background` within `margin` of the border.
inline Image island_image(int n, int margin, std::uint64_t seed, double background = 0.5) {
    Image img = random_image(n, n, seed, 0.2, 1.0);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x)
            if (y < margin || x < margin || y >= n - margin || x >= n - margin) img(y, x) = background;
    return img;
}

/// Ideal vertical step edge: `left` for x < edge, `right` otherwise.
inline Image step_image(int ny, int nx, int edge, double left = 1.0, double right = 0.0) {
    Image img(ny, nx);
    for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x) img(y, x) = x < edge ? left : right;
    return img;
}

inline std::vector<double> row_of(const Image& img, int y) {
    return std::vector<double>(img.px.begin() + static_cast<std::ptrdiff_t>(y) * img.nx,
                               img.px.begin() + static_cast<std::ptrdiff_t>(y + 1) * img.nx);
}

/// Scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("thz_" + tag + "_" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

} // namespace thz::testing
