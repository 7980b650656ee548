#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "thz/error.hpp"
#include "thz/forward_model.hpp"
#include "thz/metrics.hpp"
#include "thz/pipeline.hpp"
#include "thz/rng.hpp"

using namespace thz;
namespace ts = thz::testing;
using doctest::Approx;

namespace {

forward::PhantomSpec disk_phantom() {
    forward::PhantomSpec s;
    s.frequencies = forward::linear_frequencies(0.38, 3.3, 30);
    s.radius_px = 16;
    return s;
}

pipeline::RestorationConfig config_with_p(int p) {
    pipeline::RestorationConfig c;
    c.p = p;
    c.workers = 1;
    return c;
}

double mean_row_rise(const Image& band, int row_lo, int row_hi) {
    double s = 0.0;
    int n = 0;
    for (int r = row_lo; r < row_hi; ++r) {
        const metrics::CrossSection cs{metrics::CrossSection::Axis::Row, r, 0, 32};
        if (const auto d = metrics::rise_distance(metrics::extract_profile(band, cs))) {
            s += *d;
            ++n;
        }
    }
    REQUIRE(n > 0);
    return s / n;
}

double pearson(std::span<const double> a, std::span<const double> b) {
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(a.size());
    mb /= static_cast<double>(b.size());
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::Io;
}

} // namespace

TEST_SUITE("pipeline") {
    TEST_CASE("fasthyde is the identity on a noiseless low-rank cube") {
        const HyperCube y = ts::rank3_disk_cube(12, 32, 32);
        const HyperCube out = pipeline::fasthyde(y, config_with_p(3));
        CHECK(ts::max_abs_diff(out.data(), y.data()) <= 1e-6);
        CHECK(pipeline::fasthyde(y, pipeline::RestorationConfig{}).geometry() == y.geometry());
    }

    TEST_CASE("fasthyde cuts the error of a noisy rank-3 cube tenfold") {
        const HyperCube clean = ts::rank3_disk_cube(30, 64, 64);
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const HyperCube y = ts::add_gaussian(clean, 0.1, seed);
            const HyperCube out = pipeline::fasthyde(y, config_with_p(3));
            CHECK(ts::mse(out.data(), clean.data()) <= 0.1 * ts::mse(y.data(), clean.data()));
        }
    }

    TEST_CASE("fasthyde leaves low-frequency beam blur in place") {
        const HyperCube blurred = forward::blur_cube(forward::generate_phantom(disk_phantom()), beam::BeamGeometry{}, 0.0, 1);
        const double before = mean_row_rise(blurred.band_image(0), 28, 36);
        for (std::uint64_t seed : {3, 7, 42}) {
            const HyperCube y = ts::add_gaussian(blurred, 0.005, seed);
            pipeline::RestorationConfig c;
            c.workers = 1;
            const HyperCube out = pipeline::fasthyde(y, c);
            CHECK(mean_row_rise(out.band_image(0), 28, 36) == Approx(before).epsilon(0.05));
        }
    }

    TEST_CASE("joint restoration with delta PSFs equals fasthyde bit for bit") {
        const HyperCube y = ts::add_gaussian(ts::rank3_disk_cube(10, 32, 32), 0.05, 3);
        auto c = config_with_p(3);
        c.psf_scale_mode = pipeline::PsfScaleMode::Manual;
        c.manual_w0 = {0.0, 0.0, 0.0};
        for (auto noise : {pipeline::NoiseType::Iid, pipeline::NoiseType::NonIid}) {
            c.noise_type = noise;
            const HyperCube joint = pipeline::joint_restore(y, c);
            const HyperCube fast = pipeline::fasthyde(y, c);
            CHECK(joint == fast);
        }
    }

    TEST_CASE("joint restoration preserves metadata and beats fasthyde on low-band edges") {
        const auto sim = forward::simulate(disk_phantom(), beam::BeamGeometry{}, forward::NoiseModel::gaussian_iid(0.05, 42), 0.0, 1);
        const auto c = config_with_p(1);
        const HyperCube joint = pipeline::joint_restore(sim.degraded, c);
        const HyperCube fast = pipeline::fasthyde(sim.degraded, c);
        CHECK(joint.geometry() == sim.degraded.geometry());
        CHECK(fast.geometry() == sim.degraded.geometry());
        CHECK(mean_row_rise(joint.band_image(0), 28, 36) < mean_row_rise(fast.band_image(0), 28, 36));
    }

    TEST_CASE("joint restoration improves on the degraded cube at every noise level") {
        for (double sigma : {0.02, 0.05, 0.1})
            for (std::uint64_t seed = 1; seed <= 2; ++seed) {
                auto spec = disk_phantom();
                spec.frequencies = forward::linear_frequencies(0.38, 3.3, 12);
                spec.ny = spec.nx = 48;
                spec.radius_px = 12;
                const auto sim = forward::simulate(spec, beam::BeamGeometry{}, forward::NoiseModel::gaussian_iid(sigma, seed), 0.0, 1);
                const HyperCube out = pipeline::joint_restore(sim.degraded, config_with_p(1));
                CHECK(ts::mse(out.data(), sim.clean.data()) < ts::mse(sim.degraded.data(), sim.clean.data()));
            }
    }

    TEST_CASE("Anscombe path restores a Poisson constant cube to its level") {
        for (double gain : {1.0, 2.5}) {
            const double level = 20.0 * gain;
            const HyperCube c(ts::geometry(8, 32, 32), std::vector<double>(8 * 32 * 32, level));
            const HyperCube y = forward::add_noise(c, forward::NoiseModel::poisson(gain, 9), 1);
            auto cfg = config_with_p(1);
            cfg.noise_type = pipeline::NoiseType::Poisson;
            cfg.poisson_gain = gain;
            const HyperCube out = pipeline::fasthyde(y, cfg);
            double m = 0.0;
            for (double v : out.data()) m += v;
            m /= static_cast<double>(out.data().size());
            CHECK(m == Approx(level).epsilon(0.02));
        }
    }

    TEST_CASE("unbiased inverse Anscombe recovers Poisson means") {
        CHECK(pipeline::anscombe(0.0) == Approx(2.0 * std::sqrt(0.375)));
        for (double mean : {3.0, 8.0, 30.0}) {
            Xoshiro256 rng(17);
            double acc = 0.0;
            const int n = 200000;
            for (int i = 0; i < n; ++i) acc += pipeline::anscombe(static_cast<double>(rng.poisson(mean)));
            CHECK(pipeline::inverse_anscombe(acc / n) == Approx(mean).epsilon(0.01));
        }
    }

    TEST_CASE("discarding an injected component removes its pattern") {
        const int b = 20, n = 48;
        const auto maps = ts::structured_maps(n, n);
        Eigen::MatrixXd spectra(b, 3);
        for (int i = 0; i < b; ++i) {
            const double t = -1.0 + 2.0 * i / (b - 1);
            spectra(i, 0) = 1.0;
            spectra(i, 1) = 0.5 * t;
            spectra(i, 2) = 1.5 * t * t - 0.5;
        }
        Eigen::VectorXd s3 = spectra.col(2);
        for (int k = 0; k < 2; ++k) {
            const Eigen::VectorXd q = spectra.col(k).normalized();
            s3 -= q.dot(s3) * q;
        }
        spectra.col(2) = s3 * (0.3 / s3.cwiseAbs().maxCoeff());
        const auto geom = ts::geometry(b, n, n);
        const HyperCube clean = ts::cube_from_factors(geom, spectra.leftCols(2), {maps[0], maps[1]});
        const HyperCube injected = ts::cube_from_factors(geom, spectra.rightCols(1), {maps[2]});
        std::vector<double> sum(clean.data().begin(), clean.data().end());
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += injected.data()[i];
        const HyperCube y = ts::add_gaussian(clean.with_data(sum), 0.02, 4);

        auto c = config_with_p(3);
        c.psf_scale_mode = pipeline::PsfScaleMode::Manual;
        c.manual_w0 = {0.0, 0.0, 0.0};
        const auto analysis = pipeline::analyze(y, c);
        int target = 0;
        double best = 0.0;
        const Eigen::VectorXd dir = spectra.col(2).normalized();
        for (int k = 0; k < 3; ++k) {
            const double d = std::abs(analysis.basis.E.col(k).dot(dir));
            if (d > best) {
                best = d;
                target = k;
            }
        }
        REQUIRE(best > 0.9);
        const HyperCube kept = pipeline::joint_restore(y, c);
        c.components_to_discard = {target};
        const HyperCube removed = pipeline::joint_restore(y, c);
        CHECK(std::abs(pearson(kept.data(), injected.data())) > 0.15);
        CHECK(std::abs(pearson(removed.data(), injected.data())) <= 0.05);
    }

    TEST_CASE("configuration errors") {
        const HyperCube y = ts::add_gaussian(ts::rank3_disk_cube(6, 24, 24), 0.05, 1);
        auto c = config_with_p(2);
        c.components_to_discard = {0, 1};
        CHECK(kind_of([&] { pipeline::joint_restore(y, c); }) == ErrorKind::Configuration);
        c.components_to_discard = {2};
        CHECK(kind_of([&] { pipeline::joint_restore(y, c); }) == ErrorKind::Configuration);
        c.components_to_discard = {};
        c.psf_scale_mode = pipeline::PsfScaleMode::Manual;
        c.manual_w0 = {0.5};
        CHECK(kind_of([&] { pipeline::joint_restore(y, c); }) == ErrorKind::Configuration);
        CHECK(kind_of([&] { pipeline::fasthyde(y, config_with_p(7)); }) == ErrorKind::Configuration);
        CHECK(kind_of([&] { pipeline::noise_type_from_string("pink"); }) == ErrorKind::Configuration);
        CHECK(pipeline::noise_type_from_string("noniid") == pipeline::NoiseType::NonIid);
        CHECK(kind_of([&] { pipeline::fasthyde(ts::random_cube(2, 8, 8, 1), {}); }) == ErrorKind::Validation);
    }

    TEST_CASE("reports carry the chosen dimension and per-component waists") {
        const auto sim = forward::simulate(disk_phantom(), beam::BeamGeometry{}, forward::NoiseModel::gaussian_iid(0.05, 42), 0.0, 1);
        const auto r = pipeline::joint_restore_detailed(sim.degraded, config_with_p(3));
        CHECK(r.report.p == 3);
        REQUIRE(r.report.components.size() == 3);
        CHECK(r.report.noise_sigma_per_band.size() == 30);
        for (const auto& comp : r.report.components) {
            const double w0 = beam::beam_waist(beam::wavelength_from_frequency(comp.info.effective_frequency), beam::BeamGeometry{});
            CHECK(comp.w0 == Approx(w0));
            CHECK(comp.denoise_sigma >= comp.noise_sigma);
            CHECK_FALSE(comp.discarded);
        }
        const auto a = pipeline::analyze(sim.degraded, config_with_p(3));
        CHECK(a.report.p == 3);
        CHECK(a.basis.p() == 3);
        CHECK(a.report.components[0].info.energy_fraction > 0.8);
    }
}
