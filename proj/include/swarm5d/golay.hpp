// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "swarm5d/errors.hpp"
#include "swarm5d/radar_params.hpp"

namespace swarm5d {

/// A complementary pair of +-1 sequences: the sum of their aperiodic
/// autocorrelations is 2L at lag zero and exactly zero at every other lag.
struct GolayPair {
    std::vector<int> a;
    std::vector<int> b;

    std::size_t length() const { return a.size(); }
};

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

namespace detail {

struct DelayWeight {
    std::vector<std::size_t> delays;
    std::vector<int> weights;
    bool reverse; // the 802.11ad definitions index their sequences time-reversed
};

/// Delay/weight vectors for the recursive construction. Lengths 32..256 use
/// the constants of the IEEE 802.11ad preamble sequences so that the
/// channel-estimation waveform assembled from the 256-pair is bit-compatible
/// with the standard. Other powers of two use the natural ordering.
inline DelayWeight delay_weight_for(std::size_t length) {
    switch (length) {
    case 32:
        return {{1, 4, 8, 2, 16}, {-1, 1, -1, 1, -1}, true};
    case 64:
        return {{2, 1, 4, 8, 16, 32}, {1, 1, -1, -1, 1, -1}, true};
    case 128:
        return {{1, 8, 2, 4, 16, 32, 64}, {-1, -1, -1, -1, 1, -1, -1}, true};
    case 256:
        return {{1, 8, 2, 4, 16, 32, 64, 128}, {-1, -1, -1, -1, 1, -1, -1, -1}, true};
    case 512:
        return {{1, 8, 2, 4, 16, 32, 64, 128, 256}, {-1, -1, -1, -1, 1, -1, -1, -1, -1}, true};
    default: {
        DelayWeight dw;
        for (std::size_t d = 1; d < length; d *= 2) {
            dw.delays.push_back(d);
            dw.weights.push_back(1);
        }
        dw.reverse = false;
        return dw;
    }
    }
}

} // namespace detail

/// Generates the complementary pair of the requested length via the standard
/// delay-weight recursion:
///   a_k(n) = w_k a_{k-1}(n) + b_{k-1}(n - d_k)
///   b_k(n) = w_k a_{k-1}(n) - b_{k-1}(n - d_k)
/// starting from a_0 = b_0 = delta. Integer arithmetic throughout.
inline GolayPair generate_golay_pair(std::size_t length) {
    if (!is_power_of_two(length) || length < 2 || length > 512)
        throw InvalidArgumentError("Golay length must be a power of two in [2, 512], got " +
                                   std::to_string(length));

    const auto dw = detail::delay_weight_for(length);
    std::vector<int> a{1};
    std::vector<int> b{1};
    for (std::size_t k = 0; k < dw.delays.size(); ++k) {
        const std::size_t d = dw.delays[k];
        const int w = dw.weights[k];
        const std::size_t n = a.size() + d;
        std::vector<int> a2(n, 0);
        std::vector<int> b2(n, 0);
        for (std::size_t i = 0; i < a.size(); ++i) {
            a2[i] += w * a[i];
            b2[i] += w * a[i];
        }
        for (std::size_t i = 0; i < b.size(); ++i) {
            a2[i + d] += b[i];
            b2[i + d] -= b[i];
        }
        a = std::move(a2);
        b = std::move(b2);
    }
    if (dw.reverse) {
        std::reverse(a.begin(), a.end());
        std::reverse(b.begin(), b.end());
    }
    return {std::move(a), std::move(b)};
}

/// One pulse of complex baseband samples. `samples` holds the active part;
/// the remainder of the PRI (the listening window) is zero by construction
/// once the pulse is placed on the fast-time grid.
struct PulseWaveform {
    std::vector<std::complex<double>> samples;

    std::size_t active_length() const { return samples.size(); }

    PulseWaveform scaled(double amplitude) const {
        PulseWaveform out = *this;
        for (auto& s : out.samples) s *= amplitude;
        return out;
    }
};

enum class CefVariant { kSingleGu, kComplementaryPair };

namespace detail {

inline PulseWaveform concat_blocks(const std::vector<int>& first, int sign_first,
                                   const std::vector<int>& second, int sign_second) {
    PulseWaveform w;
    w.samples.reserve(first.size() + second.size());
    for (int v : first) w.samples.emplace_back(static_cast<double>(sign_first * v), 0.0);
    for (int v : second) w.samples.emplace_back(static_cast<double>(sign_second * v), 0.0);
    return w;
}

} // namespace detail

/// Assembles the 512-sample channel-estimation radar waveform Gu512 from a
/// length-256 complementary pair, using the block layout of the 802.11ad
/// preamble: Gu512 = [-Gb256, -Ga256].
inline PulseWaveform build_cef_waveform(const GolayPair& pair256) {
    if (pair256.length() != 256)
        throw InvalidArgumentError("CEF waveform needs a length-256 pair, got length " +
                                   std::to_string(pair256.length()));
    return detail::concat_blocks(pair256.b, -1, pair256.a, -1);
}

/// Builds both CEF 512-sequences: Gu512 = [-Gb256, -Ga256] and
/// Gv512 = [Gb256, -Ga256]. The two form a complementary pair themselves, so
/// summing their matched-filter outputs yields a sidelobe-free spike.
inline std::pair<PulseWaveform, PulseWaveform> build_cef_pair(const GolayPair& pair256) {
    if (pair256.length() != 256)
        throw InvalidArgumentError("CEF waveform needs a length-256 pair, got length " +
                                   std::to_string(pair256.length()));
    return {detail::concat_blocks(pair256.b, -1, pair256.a, -1),
            detail::concat_blocks(pair256.b, 1, pair256.a, -1)};
}

/// Convolves the waveform with real transmit-shaping taps. A single unit tap
/// is the identity.
inline PulseWaveform apply_shaping(const PulseWaveform& w, const std::vector<double>& taps) {
    if (taps.empty()) throw InvalidArgumentError("shaping taps must not be empty");
    if (taps.size() == 1 && taps[0] == 1.0) return w;
    PulseWaveform out;
    out.samples.assign(w.samples.size() + taps.size() - 1, {0.0, 0.0});
    for (std::size_t i = 0; i < w.samples.size(); ++i)
        for (std::size_t j = 0; j < taps.size(); ++j) out.samples[i + j] += w.samples[i] * taps[j];
    return out;
}

/// The waveform(s) a CPI transmits, one pulse per PRI.
///
/// Single-sequence mode sends Gu512 every packet. Complementary-pair mode
/// alternates Gu512 (even packets) and Gv512 (odd packets), each matched
/// filtered against its own sequence; because the two autocorrelations sum to
/// a delta, the range sidelobes cancel in the slow-time sum and a target's
/// Doppler row is sidelobe free (the cancelled energy reappears half the PRF
/// away, the usual alternating-waveform ghost).
struct WaveformSet {
    PulseWaveform a;                // even packets; the only waveform in single mode
    std::optional<PulseWaveform> b; // odd packets in pair mode

    bool pair_mode() const { return b.has_value(); }
    const PulseWaveform& for_packet(std::size_t packet) const {
        return (b && (packet & 1U)) ? *b : a;
    }
    std::size_t max_active_length() const {
        return std::max(a.active_length(), b ? b->active_length() : std::size_t{0});
    }
};

/// Builds the radar waveform set from the standard 256-length pair, with the
/// per-sample amplitude already applied.
inline WaveformSet make_waveform_set(bool complementary_pair, double amplitude = 1.0) {
    const GolayPair pair256 = generate_golay_pair(256);
    if (!complementary_pair)
        return {build_cef_waveform(pair256).scaled(amplitude), std::nullopt};
    auto [gu, gv] = build_cef_pair(pair256);
    return {gu.scaled(amplitude), gv.scaled(amplitude)};
}

/// Places the pulse at the start of one PRI: the first active_length samples
/// are the waveform, the rest of the P-sample grid is zero.
inline std::vector<std::complex<double>> assemble_pri(const PulseWaveform& w,
                                                      const RadarParams& params) {
    const std::size_t p = params.fast_time_samples;
    if (p < w.active_length())
        throw WaveformOverrunError("waveform of " + std::to_string(w.active_length()) +
                                   " samples does not fit PRI of " + std::to_string(p) +
                                   " samples");
    std::vector<std::complex<double>> out(p, {0.0, 0.0});
    std::copy(w.samples.begin(), w.samples.end(), out.begin());
    return out;
}

} // namespace swarm5d
