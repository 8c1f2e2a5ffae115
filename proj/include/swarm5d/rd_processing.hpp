// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <future>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "swarm5d/channel.hpp"
#include "swarm5d/errors.hpp"
#include "swarm5d/fft.hpp"
#include "swarm5d/golay.hpp"
#include "swarm5d/radar_params.hpp"

namespace swarm5d {

/// 2D ambiguity surface for one antenna and polarization. values is stored
/// range-major: values[range_bin * doppler_bins + doppler_bin]. The Doppler
/// axis is FFT-shifted; the center bin maps exactly to 0 Hz and approaching
/// targets land at positive Doppler.
struct RangeDopplerMap {
    std::size_t range_bins = 0;
    std::size_t doppler_bins = 0;
    std::size_t antenna_index = 0;
    Polarization pol = Polarization::kH;
    double range_bin_m = 0.0;
    double doppler_bin_hz = 0.0;
    std::vector<cd> values;

    std::size_t zero_doppler_bin() const { return doppler_bins / 2; }
    cd& at(std::size_t range_bin, std::size_t doppler_bin) {
        return values[range_bin * doppler_bins + doppler_bin];
    }
    cd at(std::size_t range_bin, std::size_t doppler_bin) const {
        return values[range_bin * doppler_bins + doppler_bin];
    }
    double range_at(std::size_t range_bin) const {
        return static_cast<double>(range_bin) * range_bin_m;
    }
    double doppler_at(std::size_t doppler_bin) const {
        return (static_cast<double>(doppler_bin) - static_cast<double>(zero_doppler_bin())) *
               doppler_bin_hz;
    }
};

/// Converts map bins to physical units: range in meters, Doppler in Hz and
/// the equivalent radial velocity v = f * lambda / 2.
struct PhysicalBin {
    double range_m = 0.0;
    double doppler_hz = 0.0;
    double velocity_mps = 0.0;
};

inline PhysicalBin bin_to_physical(std::size_t range_bin, std::size_t doppler_bin,
                                   const RadarParams& params) {
    if (range_bin >= params.fast_time_samples || doppler_bin >= params.slow_time_packets)
        throw IndexError("bin outside the range-Doppler map");
    PhysicalBin out;
    out.range_m = static_cast<double>(range_bin) * params.range_bin_m;
    const auto center = static_cast<double>(params.slow_time_packets / 2);
    out.doppler_hz = (static_cast<double>(doppler_bin) - center) * params.doppler_bin_hz;
    out.velocity_mps = out.doppler_hz * params.wavelength_m / 2.0;
    return out;
}

/// Conjugate reference spectrum of one pulse, padded to the fast-time length.
inline std::vector<cd> matched_filter_reference_spectrum(const PulseWaveform& reference,
                                                         std::size_t p_len) {
    if (reference.active_length() > p_len)
        throw DimensionError("reference longer than the fast-time dimension");
    FftPlan fwd(p_len, true);
    std::vector<cd> spec(p_len, cd{0.0, 0.0});
    std::copy(reference.samples.begin(), reference.samples.end(), spec.begin());
    fwd.execute(spec.data(), spec.data());
    for (auto& v : spec) v = std::conj(v);
    return spec;
}

/// Frequency-domain matched filter across fast time, in place: every
/// fast-time vector is replaced by its circular cross-correlation with the
/// packet's reference pulse (FFT, multiply by the conjugate reference
/// spectrum, inverse FFT). An echo deposited at delay bin d compresses to a
/// peak at range bin d, with value sum(|g|^2) for a unit-gain echo. In
/// complementary-pair mode odd packets correlate against the partner
/// sequence.
inline void matched_filter_fast_time_inplace(DataCube& cube, const WaveformSet& set) {
    const std::size_t p_len = cube.fast_len;
    if (cube.data.empty()) throw DimensionError("empty data cube");
    const std::vector<cd> spec_even = matched_filter_reference_spectrum(set.a, p_len);
    const std::vector<cd> spec_odd =
        set.b ? matched_filter_reference_spectrum(*set.b, p_len) : std::vector<cd>{};
    const double scale = 1.0 / static_cast<double>(p_len);

    auto process_antenna = [&](std::size_t ant) {
        FftPlan fwd(p_len, true);
        FftPlan inv(p_len, false);
        std::vector<cd> spec(p_len);
        for (std::size_t q = 0; q < cube.slow_len; ++q) {
            const std::vector<cd>& ref_spec = (set.b && (q & 1U)) ? spec_odd : spec_even;
            cd* row = cube.row(ant, q);
            fwd.execute(row, spec.data());
            for (std::size_t i = 0; i < p_len; ++i) spec[i] *= ref_spec[i];
            inv.execute(spec.data(), row);
            for (std::size_t i = 0; i < p_len; ++i) row[i] *= scale;
        }
    };

    if (cube.n_antennas > 1) {
        std::vector<std::future<void>> tasks;
        for (std::size_t ant = 0; ant < cube.n_antennas; ++ant)
            tasks.push_back(std::async(std::launch::async, process_antenna, ant));
        for (auto& t : tasks) t.get();
    } else {
        process_antenna(0);
    }
}

inline DataCube matched_filter_fast_time(const DataCube& cube, const WaveformSet& set) {
    DataCube out = cube;
    matched_filter_fast_time_inplace(out, set);
    return out;
}

inline DataCube matched_filter_fast_time(const DataCube& cube, const PulseWaveform& reference) {
    return matched_filter_fast_time(cube, WaveformSet{reference, std::nullopt});
}

/// Slow-time FFT of one antenna of a range-compressed cube, FFT-shifted so
/// 0 Hz sits at the center Doppler bin. Plain FFT by default; optional Hann
/// window. Unwindowed transforms preserve energy up to the FFT convention
/// factor Q (Parseval).
inline RangeDopplerMap doppler_fft(const DataCube& compressed, std::size_t antenna,
                                   const RadarParams& params, bool hann_window = false) {
    if (antenna >= compressed.n_antennas) throw IndexError("antenna index out of range");
    const std::size_t q_len = compressed.slow_len;
    const std::size_t p_len = compressed.fast_len;
    if (q_len < 2) throw InvalidArgumentError("Doppler processing needs at least two packets");

    RangeDopplerMap map;
    map.range_bins = p_len;
    map.doppler_bins = q_len;
    map.antenna_index = antenna;
    map.pol = compressed.pol;
    map.range_bin_m = params.range_bin_m;
    map.doppler_bin_hz = params.doppler_bin_hz;
    map.values.assign(p_len * q_len, cd{0.0, 0.0});

    std::vector<double> window;
    if (hann_window) {
        window.resize(q_len);
        for (std::size_t q = 0; q < q_len; ++q)
            window[q] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(q) /
                                              static_cast<double>(q_len)));
    }

    FftPlan plan(q_len, true);
    std::vector<cd> slow(q_len);
    const std::size_t center = q_len / 2;
    for (std::size_t p = 0; p < p_len; ++p) {
        for (std::size_t q = 0; q < q_len; ++q) {
            cd v = compressed.at(antenna, q, p);
            if (hann_window) v *= window[q];
            slow[q] = v;
        }
        plan.execute(slow.data(), slow.data());
        cd* dst = &map.values[p * q_len];
        for (std::size_t s = 0; s < q_len; ++s) dst[s] = slow[(s + q_len - center) % q_len];
    }
    return map;
}

/// Zeroes Doppler bins within +-half_width of 0 Hz (static-clutter discard).
inline void notch_zero_doppler(RangeDopplerMap& map, std::size_t half_width_bins) {
    const std::size_t center = map.zero_doppler_bin();
    const std::size_t lo = center > half_width_bins ? center - half_width_bins : 0;
    const std::size_t hi = std::min(map.doppler_bins - 1, center + half_width_bins);
    for (std::size_t r = 0; r < map.range_bins; ++r)
        for (std::size_t d = lo; d <= hi; ++d) map.at(r, d) = cd{0.0, 0.0};
}

/// One extracted scatterer. Bins index the range-Doppler map; doppler_hz is
/// the (sub-bin refined) estimate and velocity = doppler * lambda / 2.
/// Angles and per-polarization amplitudes are filled by later stages.
struct Detection {
    std::size_t range_bin = 0;
    std::size_t doppler_bin = 0;
    cd amplitude{0.0, 0.0};
    double range_m = 0.0;
    double doppler_hz = 0.0;
    double velocity_mps = 0.0;
    double azimuth_deg = std::numeric_limits<double>::quiet_NaN();
    double elevation_deg = std::numeric_limits<double>::quiet_NaN();
    double amplitude_h = std::numeric_limits<double>::quiet_NaN();
    double amplitude_v = std::numeric_limits<double>::quiet_NaN();
};

struct CleanOptions {
    std::size_t max_iterations = 3;
    double stop_threshold_db = -30.0; // relative to the first extracted peak
    double min_peak = 0.0;            // absolute gate; a zero residual never detects
    std::size_t search_range_bins = 0; // restrict the peak search; 0 means the whole map
    bool refine_doppler = true;       // sub-bin Doppler for the subtracted response
};

struct CleanResult {
    std::vector<Detection> detections;
    std::size_t iterations = 0;
    bool diverged = false;
    std::string note;
};

/// Generator for the point-spread response of an ideal scatterer at a given
/// range bin and Doppler frequency, produced by the same synthesis +
/// compression pipeline as the data (see synthesize_point_response).
using PointSpreadFn = std::function<RangeDopplerMap(std::size_t range_bin, double doppler_hz)>;

/// Sub-bin Doppler offset of a peak from its two neighbors (Jacobsen
/// estimator on the complex spectrum). Returns a value in [-0.5, 0.5].
inline double refine_doppler_bin(const RangeDopplerMap& map, std::size_t range_bin,
                                 std::size_t doppler_bin) {
    if (doppler_bin == 0 || doppler_bin + 1 >= map.doppler_bins) return 0.0;
    const cd x0 = map.at(range_bin, doppler_bin);
    const cd xm = map.at(range_bin, doppler_bin - 1);
    const cd xp = map.at(range_bin, doppler_bin + 1);
    const cd den = 2.0 * x0 - xp - xm;
    if (std::abs(den) < 1e-300) return 0.0;
    const double delta = -std::real((xp - xm) / den);
    return std::clamp(delta, -0.5, 0.5);
}

/// Called with the residual map after each subtraction (stage export hook).
using CleanObserver = std::function<void(std::size_t iteration, const RangeDopplerMap& residual)>;

/// Iterative peak extraction: find the strongest cell, synthesize the point
/// spread response of an ideal scatterer there, subtract it scaled to the
/// measured complex amplitude, repeat. Stops after max_iterations, when the
/// residual peak falls below stop_threshold_db of the first peak, or when the
/// residual fails to decrease (reported as divergence).
inline CleanResult clean(const RangeDopplerMap& map, const RadarParams& params,
                         const CleanOptions& options, const PointSpreadFn& point_spread,
                         const CleanObserver& observer = {}) {
    if (options.max_iterations < 1) throw InvalidArgumentError("CLEAN needs max_iterations >= 1");
    CleanResult result;
    RangeDopplerMap residual = map;
    const std::size_t search_rows = options.search_range_bins
                                        ? std::min(options.search_range_bins, map.range_bins)
                                        : map.range_bins;

    double first_peak = 0.0;
    double previous_peak = std::numeric_limits<double>::infinity();
    const double threshold_ratio = std::pow(10.0, options.stop_threshold_db / 20.0);

    for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
        std::size_t best_r = 0, best_d = 0;
        double best = 0.0;
        for (std::size_t r = 0; r < search_rows; ++r) {
            const cd* row = &residual.values[r * residual.doppler_bins];
            for (std::size_t d = 0; d < residual.doppler_bins; ++d) {
                const double mag = std::abs(row[d]);
                if (mag > best) {
                    best = mag;
                    best_r = r;
                    best_d = d;
                }
            }
        }
        if (best <= options.min_peak || best == 0.0) break;
        if (iter == 0) {
            first_peak = best;
        } else {
            if (best < first_peak * threshold_ratio) break;
            if (best >= previous_peak) {
                result.diverged = true;
                result.note = "residual peak did not decrease at iteration " +
                              std::to_string(iter);
                break;
            }
        }
        previous_peak = best;

        const cd amplitude = residual.at(best_r, best_d);
        const double delta = options.refine_doppler ? refine_doppler_bin(residual, best_r, best_d)
                                                    : 0.0;
        const double doppler_hz =
            (static_cast<double>(best_d) - static_cast<double>(residual.zero_doppler_bin()) +
             delta) *
            residual.doppler_bin_hz;

        RangeDopplerMap psf = point_spread(best_r, doppler_hz);
        if (psf.range_bins != residual.range_bins || psf.doppler_bins != residual.doppler_bins)
            throw DimensionError("point-spread map dimensions do not match");
        const cd psf_peak = psf.at(best_r, best_d);
        if (std::abs(psf_peak) == 0.0)
            throw ProcessingError("point-spread response vanished at the detected bin");
        const cd scale = amplitude / psf_peak;
        for (std::size_t i = 0; i < residual.values.size(); ++i)
            residual.values[i] -= scale * psf.values[i];

        Detection det;
        det.range_bin = best_r;
        det.doppler_bin = best_d;
        det.amplitude = amplitude;
        det.range_m = residual.range_at(best_r);
        det.doppler_hz = doppler_hz;
        det.velocity_mps = doppler_hz * params.wavelength_m / 2.0;
        result.detections.push_back(det);
        ++result.iterations;
        if (observer) observer(result.iterations, residual);
    }
    return result;
}

/// Noiseless matched-filtered range-Doppler response of an ideal point
/// scatterer at the given range bin and Doppler frequency: a unit-gain
/// waveform echo is deposited on an otherwise empty fast-time grid, rotated
/// across slow time, and pushed through the identical compression chain
/// (matched filter, slow-time FFT, optional window, notch). Pass an empty
/// notch to mirror an un-notched data map.
inline RangeDopplerMap synthesize_point_response(std::size_t range_bin, double doppler_hz,
                                                 const WaveformSet& set,
                                                 const RadarParams& params,
                                                 std::optional<std::size_t> notch_half_width_bins,
                                                 bool hann_window = false) {
    const std::size_t p_len = params.fast_time_samples;
    const std::size_t q_len = params.slow_time_packets;
    if (range_bin >= p_len) throw IndexError("range bin outside the fast-time grid");

    DataCube cube = DataCube::zeros(1, q_len, p_len, Polarization::kH);
    std::vector<cd> base_even(p_len, cd{0.0, 0.0});
    deposit_waveform(base_even.data(), p_len, set.a, cd{1.0, 0.0},
                     static_cast<double>(range_bin));
    std::vector<cd> base_odd;
    if (set.b) {
        base_odd.assign(p_len, cd{0.0, 0.0});
        deposit_waveform(base_odd.data(), p_len, *set.b, cd{1.0, 0.0},
                         static_cast<double>(range_bin));
    }
    for (std::size_t q = 0; q < q_len; ++q) {
        const std::vector<cd>& base = (set.b && (q & 1U)) ? base_odd : base_even;
        const cd rot = std::polar(1.0, 2.0 * std::numbers::pi * doppler_hz *
                                           static_cast<double>(q) * params.pri_s);
        cd* row = cube.row(0, q);
        for (std::size_t p = 0; p < p_len; ++p) row[p] = rot * base[p];
    }
    matched_filter_fast_time_inplace(cube, set);
    RangeDopplerMap map = doppler_fft(cube, 0, params, hann_window);
    if (notch_half_width_bins) notch_zero_doppler(map, *notch_half_width_bins);
    return map;
}

inline RangeDopplerMap synthesize_point_response(std::size_t range_bin, double doppler_hz,
                                                 const PulseWaveform& tx,
                                                 const RadarParams& params,
                                                 std::optional<std::size_t> notch_half_width_bins,
                                                 bool hann_window = false) {
    return synthesize_point_response(range_bin, doppler_hz, WaveformSet{tx, std::nullopt},
                                     params, notch_half_width_bins, hann_window);
}

} // namespace swarm5d
