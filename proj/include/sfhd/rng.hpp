#ifndef SFHD_RNG_HPP
#define SFHD_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace sfhd::rng {

struct U2 {
    std::uint64_t v0, v1;
};

/// Threefry-2x64, 20 rounds (Salmon et al., "Parallel random numbers: as easy
/// as 1, 2, 3"). Counter-based: the output depends only on (ctr, key), so any
/// variate is addressable without sequential state.
inline U2 threefry2x64(U2 ctr, U2 key) {
    constexpr std::uint64_t parity = 0x1BD11BDAA9FC1A22ULL;
    constexpr int rot[8] = {16, 42, 12, 31, 16, 32, 24, 21};
    const std::uint64_t ks[3] = {key.v0, key.v1, parity ^ key.v0 ^ key.v1};
    std::uint64_t x0 = ctr.v0 + ks[0];
    std::uint64_t x1 = ctr.v1 + ks[1];
    auto rotl = [](std::uint64_t x, int r) { return (x << r) | (x >> (64 - r)); };
    for (int i = 0; i < 20; ++i) {
        x0 += x1;
        x1 = rotl(x1, rot[i % 8]);
        x1 ^= x0;
        if (i % 4 == 3) {
            const int j = i / 4 + 1;
            x0 += ks[j % 3];
            x1 += ks[(j + 1) % 3] + static_cast<std::uint64_t>(j);
        }
    }
    return {x0, x1};
}

/// Uniform in (0, 1) from the top 53 bits.
inline double to_unit(std::uint64_t u) {
    return (static_cast<double>(u >> 11) + 0.5) * 0x1.0p-53;
}

/// Two independent standard normal variates addressed by (seed, l, m, i).
/// The same address always yields the same pair, regardless of call order
/// or thread schedule.
inline std::pair<double, double> gaussian_pair(std::uint64_t seed, int l, int m, int i) {
    const U2 ctr{(static_cast<std::uint64_t>(static_cast<std::uint32_t>(l)) << 40) |
                     (static_cast<std::uint64_t>(static_cast<std::uint32_t>(m)) << 20) |
                     static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)),
                 0};
    const U2 key{seed, 0x5f68644bd8a82e13ULL};
    const U2 r = threefry2x64(ctr, key);
    const double u1 = to_unit(r.v0);
    const double u2 = to_unit(r.v1);
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    return {rad * std::cos(ang), rad * std::sin(ang)};
}

} // namespace sfhd::rng

#endif
