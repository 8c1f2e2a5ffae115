// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace swarm5d {

/// Counter-friendly 64-bit generator (SplitMix64). Cheap to construct, so a
/// fresh stream can be keyed per (polarization, antenna, packet) and the
/// output never depends on worker scheduling.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// One draw of a standard complex normal: independent N(0,1) real and
    /// imaginary parts (E|z|^2 = 2). Box-Muller on two uniforms.
    std::complex<double> gaussian_pair() {
        const double u1 = (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; // (0, 1]
        const double u2 = uniform01();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * std::numbers::pi * u2;
        return {mag * std::cos(ang), mag * std::sin(ang)};
    }

private:
    std::uint64_t state_;
};

/// Mixes extra words into a seed so that (seed, a, b, c) tuples give
/// decorrelated streams.
inline std::uint64_t mix_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                             std::uint64_t c = 0) {
    SplitMix64 g(seed ^ (a * 0xd6e8feb86659fd93ULL) ^ (b * 0xa5cb3b207c7fd7ddULL) ^
                 (c * 0x9e6c63d0876a9f4bULL));
    return g.next();
}

/// Named substream of a root seed ("noise", "clutter", ...). FNV-1a over the
/// name, mixed with the root.
inline std::uint64_t substream(std::uint64_t root_seed, std::string_view name) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char ch : name) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ULL;
    }
    return mix_key(root_seed, h);
}

} // namespace swarm5d
