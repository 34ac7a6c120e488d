#pragma once

#include <array>
#include <cstdint>

#include "djl/math.hpp"

// Counter-based random numbers (Philox 4x32-10).  Every draw is a pure
// function of (seed, stream, counter), so partitioned parallel runs and
// serial runs produce identical values.

namespace djl::rng {

namespace detail {

inline void philox_round(std::array<uint32_t, 4>& ctr, std::array<uint32_t, 2>& key) {
    const uint64_t m0 = 0xD2511F53ULL * ctr[0];
    const uint64_t m1 = 0xCD9E8D57ULL * ctr[2];
    std::array<uint32_t, 4> out;
    out[0] = static_cast<uint32_t>(m1 >> 32) ^ ctr[1] ^ key[0];
    out[1] = static_cast<uint32_t>(m1);
    out[2] = static_cast<uint32_t>(m0 >> 32) ^ ctr[3] ^ key[1];
    out[3] = static_cast<uint32_t>(m0);
    ctr = out;
    key[0] += 0x9E3779B9u;
    key[1] += 0xBB67AE85u;
}

}  // namespace detail

inline std::array<uint32_t, 4> philox4x32(uint64_t seed, uint64_t stream, uint64_t counter) {
    std::array<uint32_t, 4> ctr = {
        static_cast<uint32_t>(counter), static_cast<uint32_t>(counter >> 32),
        static_cast<uint32_t>(stream), static_cast<uint32_t>(stream >> 32)};
    std::array<uint32_t, 2> key = {static_cast<uint32_t>(seed),
                                   static_cast<uint32_t>(seed >> 32)};
    for (int r = 0; r < 10; ++r) detail::philox_round(ctr, key);
    return ctr;
}

// Uniform on (0,1), 53 bits of the 128-bit block.
inline double u01(uint64_t seed, uint64_t stream, uint64_t counter) {
    auto b = philox4x32(seed, stream, counter);
    uint64_t hi = (static_cast<uint64_t>(b[0]) << 32) | b[1];
    return (static_cast<double>(hi >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

inline double normal(uint64_t seed, uint64_t stream, uint64_t counter) {
    return inv_norm_cdf(u01(seed, stream, counter));
}

}  // namespace djl::rng
