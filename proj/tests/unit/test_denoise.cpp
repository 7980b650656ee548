#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "thz/denoise.hpp"
#include "thz/error.hpp"

using namespace thz;
namespace ts = thz::testing;

namespace {

denoise::PatchDenoiseParams params(double sigma, int patch = 7, int window = 21) {
    denoise::PatchDenoiseParams p;
    p.sigma = sigma;
    p.patch_size = patch;
    p.search_window = window;
    return p;
}

Image noisy(const Image& clean, double sigma, std::uint64_t seed) {
    return ts::add_gaussian(HyperCube(ts::geometry(1, clean.ny, clean.nx), clean.px), sigma, seed).band_image(0);
}

int steepest_column(const Image& img, int row) {
    int best = 0;
    double g = -1.0;
    for (int x = 0; x + 1 < img.nx; ++x) {
        const double d = std::abs(img(row, x + 1) - img(row, x));
        if (d > g) {
            g = d;
            best = x;
        }
    }
    return best;
}

} // namespace

TEST_SUITE("denoise") {
    TEST_CASE("vanishing sigma leaves the image unchanged") {
        const Image img = ts::random_image(24, 24, 1);
        CHECK(ts::max_abs_diff(denoise::patch_denoise(img, params(1e-9)).px, img.px) <= 1e-6);
    }

    TEST_CASE("noise on a constant image is strongly reduced") {
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const Image y = noisy(Image(64, 64, 0.5), 0.1, seed);
            const Image out = denoise::patch_denoise(y, params(0.1));
            CHECK(variance(out) <= 0.1 * variance(y));
        }
    }

    TEST_CASE("a noiseless step edge stays in place") {
        const Image step = ts::step_image(32, 32, 13, 1.0, 0.2);
        const Image out = denoise::patch_denoise(step, params(0.05));
        for (int row : {0, 10, 31}) CHECK(steepest_column(out, row) == steepest_column(step, row));
    }

    TEST_CASE("scale covariance") {
        const Image y = noisy(ts::step_image(24, 24, 11), 0.08, 3);
        const Image base = denoise::patch_denoise(y, params(0.08, 5, 11));
        for (double a : {0.25, 3.0}) {
            Image ya = y;
            for (double& v : ya.px) v *= a;
            const Image out = denoise::patch_denoise(ya, params(0.08 * a, 5, 11));
            for (std::size_t i = 0; i < out.size(); ++i) CHECK(std::abs(out.px[i] - a * base.px[i]) <= 1e-6);
        }
    }

    TEST_CASE("output stays within the input range") {
        const Image y = noisy(ts::random_image(20, 20, 4), 0.2, 4);
        const Image out = denoise::patch_denoise(y, params(0.2, 5, 15));
        const double lo = min_value(y), hi = max_value(y);
        for (double v : out.px) {
            CHECK(v >= lo - 1e-12);
            CHECK(v <= hi + 1e-12);
        }
    }

    TEST_CASE("translation equivariance in the interior") {
        const Image x = noisy(ts::island_image(64, 20, 5), 0.05, 5);
        const Image xs = ts::shifted(x, 2, 2, 0.0);
        const Image a = denoise::patch_denoise(x, params(0.05, 5, 11));
        const Image b = denoise::patch_denoise(xs, params(0.05, 5, 11));
        double err = 0.0;
        for (int y = 16; y < 46; ++y)
            for (int c = 16; c < 46; ++c) err = std::max(err, std::abs(b(y + 2, c + 2) - a(y, c)));
        CHECK(err <= 1e-6);
    }

    TEST_CASE("parameter validation") {
        CHECK_THROWS_AS(params(0.1, 6).validate(), Error);
        CHECK_THROWS_AS(params(0.1, 7, 20).validate(), Error);
        CHECK_THROWS_AS(params(0.1, 7, 7).validate(), Error);
        CHECK_THROWS_AS(params(-0.1).validate(), Error);
        auto p = params(0.1);
        p.h = 0.0;
        CHECK_THROWS_AS(p.validate(), Error);
        CHECK(params(0.1).strength() == doctest::Approx(0.55 * 0.1 * 7));
    }

    TEST_CASE("eigen-image denoising: zero sigmas are the identity, lengths must match") {
        const HyperCube y = ts::random_cube(5, 16, 16, 6);
        const auto basis = subspace::learn_subspace(y, 3, subspace::estimate_noise(y));
        const auto eigen = subspace::project(y, basis);
        const auto out = denoise::denoise_eigen_images(eigen, {0.0, 0.0, 0.0});
        CHECK(out.A == eigen.A);
        CHECK_THROWS_AS(denoise::denoise_eigen_images(eigen, {0.1, 0.1}), Error);
    }

    TEST_CASE("rank-1 cube with p = 1: MSE falls at least fivefold") {
        const HyperCube clean = ts::cube_from_factors(ts::geometry(20, 48, 48), Eigen::VectorXd::LinSpaced(20, 1.0, 0.4),
                                                      {ts::structured_maps(48, 48)[0]});
        const HyperCube y = ts::add_gaussian(clean, 0.1, 7);
        subspace::SubspaceBasis basis;
        basis.E = Eigen::VectorXd::LinSpaced(20, 1.0, 0.4).normalized();
        const auto out = denoise::denoise_eigen_images(subspace::project(y, basis), {0.1});
        const HyperCube r = subspace::reconstruct(basis, out);
        CHECK(ts::mse(r.data(), clean.data()) * 5.0 <= ts::mse(y.data(), clean.data()));
    }

    TEST_CASE("noise-only components lose their energy") {
        const HyperCube clean = ts::cube_from_factors(ts::geometry(10, 48, 48), Eigen::VectorXd::Constant(10, 1.0),
                                                      {ts::structured_maps(48, 48)[0]});
        const HyperCube y = ts::add_gaussian(clean, 0.05, 8);
        subspace::SubspaceBasis basis;
        basis.E = ts::random_orthonormal(10, 3, 2);
        basis.E.col(0) = Eigen::VectorXd::Constant(10, 1.0 / std::sqrt(10.0));
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis.E);
        basis.E = qr.householderQ() * Eigen::MatrixXd::Identity(10, 3);
        const auto eigen = subspace::project(y, basis);
        const auto out = denoise::denoise_eigen_images(eigen, {0.05, 0.05, 0.05});
        for (int k = 1; k < 3; ++k) CHECK(out.A.row(k).squaredNorm() <= 0.1 * eigen.A.row(k).squaredNorm());
    }
}
