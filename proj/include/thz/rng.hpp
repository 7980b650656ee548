#pragma once

#include <cstdint>

namespace thz {

/// SplitMix64 step; used to expand a 64-bit seed into generator state.
std::uint64_t splitmix64(std::uint64_t& state);

/// xoshiro256** 1.0 (Blackman & Vigna), seeded by four SplitMix64 outputs.
///
/// Derived samplers are fixed so streams are reproducible across implementations:
///  - uniform01(): (next() >> 11) * 2^-53, in [0, 1)
///  - normal(): Box-Muller, u1 = 1 - uniform01(), u2 = uniform01(),
///    returns sqrt(-2 ln u1) cos(2 pi u2) then sqrt(-2 ln u1) sin(2 pi u2)
///  - poisson(mean): multiplication method (Knuth) for mean < 10,
///    transformed rejection with squeeze (Hormann's PTRS) otherwise.
class Xoshiro256 {
public:
    explicit Xoshiro256(std::uint64_t seed);

    std::uint64_t next();
    double uniform01();
    double normal();
    std::uint64_t poisson(double mean);

private:
    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace thz
