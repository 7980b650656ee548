#include <doctest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "thz/parallel.hpp"
#include "thz/rng.hpp"

using namespace thz;
using doctest::Approx;

namespace {

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

/// Straight transcription of the published xoshiro256** and SplitMix64 reference code.
struct ReferenceXoshiro {
    std::uint64_t s[4];
    explicit ReferenceXoshiro(std::uint64_t seed) {
        for (auto& v : s) {
            std::uint64_t z = (seed += 0x9e3779b97f4a7c15ULL);
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            v = z ^ (z >> 31);
        }
    }
    std::uint64_t next() {
        const std::uint64_t result = rotl(s[1] * 5, 7) * 9;
        const std::uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        return result;
    }
};

} // namespace

TEST_SUITE("runtime") {
    TEST_CASE("SplitMix64 known value") {
        std::uint64_t state = 0;
        CHECK(splitmix64(state) == 0xe220a8397b1dcdafULL);
    }

    TEST_CASE("xoshiro256** matches the reference transcription") {
        for (std::uint64_t seed : {0ULL, 1ULL, 42ULL, 0xdeadbeefULL}) {
            Xoshiro256 g(seed);
            ReferenceXoshiro r(seed);
            for (int i = 0; i < 1000; ++i) CHECK(g.next() == r.next());
        }
    }

    TEST_CASE("uniform and normal samplers") {
        Xoshiro256 g(3);
        double s = 0.0, s2 = 0.0;
        const int n = 200000;
        for (int i = 0; i < n; ++i) {
            const double u = g.uniform01();
            CHECK(u >= 0.0);
            CHECK(u < 1.0);
        }
        for (int i = 0; i < n; ++i) {
            const double z = g.normal();
            s += z;
            s2 += z * z;
        }
        CHECK(std::abs(s / n) < 0.01);
        CHECK(s2 / n == Approx(1.0).epsilon(0.01));
    }

    TEST_CASE("Poisson sampler mean and variance in both regimes") {
        for (double mean : {0.5, 4.0, 9.9, 10.0, 37.0, 400.0}) {
            Xoshiro256 g(11);
            double s = 0.0, s2 = 0.0;
            const int n = 100000;
            for (int i = 0; i < n; ++i) {
                const double k = static_cast<double>(g.poisson(mean));
                s += k;
                s2 += k * k;
            }
            const double m = s / n;
            CHECK(m == Approx(mean).epsilon(0.02));
            CHECK(s2 / n - m * m == Approx(mean).epsilon(0.05));
        }
        Xoshiro256 g(1);
        CHECK(g.poisson(0.0) == 0);
    }

    TEST_CASE("parallel_for visits every index once and rethrows") {
        for (unsigned workers : {1u, 2u, 7u}) {
            std::vector<std::atomic<int>> hits(1000);
            parallel_for(hits.size(), workers, [&](std::size_t i) { hits[i]++; });
            for (const auto& h : hits) CHECK(h.load() == 1);
        }
        CHECK_THROWS_AS(parallel_for(50, 4,
                                     [](std::size_t i) {
                                         if (i == 17) throw std::runtime_error("boom");
                                     }),
                        std::runtime_error);
        parallel_for(0, 4, [](std::size_t) { FAIL("no work expected"); });
    }

    TEST_CASE("worker count comes from the environment when set") {
        ::setenv("THZ_WORKERS", "3", 1);
        CHECK(default_workers() == 3);
        ::unsetenv("THZ_WORKERS");
        CHECK(default_workers() >= 1);
    }
}
