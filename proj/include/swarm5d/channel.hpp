// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <future>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "swarm5d/errors.hpp"
#include "swarm5d/geometry.hpp"
#include "swarm5d/golay.hpp"
#include "swarm5d/radar_params.hpp"
#include "swarm5d/rng.hpp"

namespace swarm5d {

using cd = std::complex<double>;

inline const double kSqrt4Pi = std::sqrt(4.0 * std::numbers::pi);

/// Direct and ground-reflected path lengths between two points above the
/// ground plane, via the image method, plus the grazing angle of the
/// reflected ray at the specular point.
struct PathPair {
    double r_direct_m = 0.0;
    double r_reflected_m = 0.0;
    double grazing_rad = 0.0;
};

inline PathPair two_ray_paths(const Vec3& from, const Vec3& to) {
    PathPair p;
    p.r_direct_m = (to - from).norm();
    const Vec3 image = to.ground_image();
    p.r_reflected_m = (image - from).norm();
    if (p.r_reflected_m > 0.0) {
        const double s = std::clamp((from.z + to.z) / p.r_reflected_m, -1.0, 1.0);
        p.grazing_rad = std::asin(s);
    }
    return p;
}

/// Fresnel reflection coefficients for horizontal (perpendicular) and
/// vertical (parallel) polarization at the given grazing angle. In fixed
/// mode the configured constants are returned regardless of angle.
inline std::pair<cd, cd> fresnel_gamma(double grazing_rad, const GroundModel& ground) {
    if (ground.mode == GroundModel::Mode::kFixed)
        return {ground.fixed_gamma_h, ground.fixed_gamma_v};
    if (!(grazing_rad > 0.0) || grazing_rad > std::numbers::pi / 2.0 + 1e-12)
        throw InvalidArgumentError("grazing angle must lie in (0, pi/2]");
    const double s = std::sin(grazing_rad);
    const double c2 = 1.0 - s * s;
    const cd er = ground.relative_permittivity;
    const cd root = std::sqrt(er - c2);
    const cd gamma_h = (s - root) / (s + root);
    const cd gamma_v = (er * s - root) / (er * s + root);
    return {gamma_h, gamma_v};
}

/// Two-term spherical-spreading gain:
///   e^{-jkr}/(sqrt(4 pi) r) + Gamma e^{-jkr'}/(sqrt(4 pi) r').
inline cd propagation_gain(const PathPair& path, cd gamma, double wavenumber_rad_m) {
    if (path.r_direct_m <= 0.0)
        throw InvalidArgumentError("invalid geometry: direct path length must be positive");
    cd g = std::polar(1.0 / (kSqrt4Pi * path.r_direct_m), -wavenumber_rad_m * path.r_direct_m);
    if (gamma != cd{0.0, 0.0})
        g += gamma * std::polar(1.0 / (kSqrt4Pi * path.r_reflected_m),
                                -wavenumber_rad_m * path.r_reflected_m);
    return g;
}

/// Additive complex white Gaussian noise: linear variance per complex sample.
struct NoiseModel {
    double power = 0.0;
    std::uint64_t seed = 0;

    void validate() const {
        if (power < 0.0) throw InvalidArgumentError("noise power must be non-negative");
    }
};

enum class Polarization { kH = 0, kV = 1 };

inline const char* polarization_name(Polarization p) { return p == Polarization::kH ? "H" : "V"; }

/// Complex baseband samples, dimensions N antennas x Q packets x P fast-time
/// samples, stored fast-time contiguous.
struct DataCube {
    std::size_t n_antennas = 0;
    std::size_t slow_len = 0; // Q
    std::size_t fast_len = 0; // P
    Polarization pol = Polarization::kH;
    std::vector<cd> data;

    static DataCube zeros(std::size_t n, std::size_t q, std::size_t p, Polarization pol) {
        DataCube c;
        c.n_antennas = n;
        c.slow_len = q;
        c.fast_len = p;
        c.pol = pol;
        c.data.assign(n * q * p, cd{0.0, 0.0});
        return c;
    }

    cd* row(std::size_t antenna, std::size_t packet) {
        return data.data() + (antenna * slow_len + packet) * fast_len;
    }
    const cd* row(std::size_t antenna, std::size_t packet) const {
        return data.data() + (antenna * slow_len + packet) * fast_len;
    }
    cd at(std::size_t antenna, std::size_t packet, std::size_t sample) const {
        return row(antenna, packet)[sample];
    }
};

/// Adds `gain * waveform` into a fast-time row at the given (possibly
/// fractional) sample delay. Returns false when the delay falls outside the
/// PRI. Nearest-sample placement by default; band-limited placement uses a
/// Hann-windowed sinc kernel.
inline bool deposit_waveform(cd* row, std::size_t fast_len, const PulseWaveform& w, cd gain,
                             double delay_samples, bool sinc_interpolation = false) {
    if (delay_samples >= static_cast<double>(fast_len) || delay_samples < 0.0) return false;
    if (!sinc_interpolation) {
        const auto bin = static_cast<std::size_t>(std::llround(delay_samples));
        if (bin >= fast_len) return false;
        const std::size_t count = std::min(w.active_length(), fast_len - bin);
        for (std::size_t i = 0; i < count; ++i) row[bin + i] += gain * w.samples[i];
        return true;
    }
    constexpr int kHalfWidth = 8;
    const auto base = static_cast<long long>(std::floor(delay_samples));
    const double frac = delay_samples - static_cast<double>(base);
    double taps[2 * kHalfWidth];
    for (int t = -kHalfWidth + 1; t <= kHalfWidth; ++t) {
        const double x = static_cast<double>(t) - frac;
        const double sinc = x == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
        const double win = 0.5 * (1.0 + std::cos(std::numbers::pi * x / kHalfWidth));
        taps[t + kHalfWidth - 1] = sinc * win;
    }
    for (std::size_t i = 0; i < w.active_length(); ++i) {
        const cd v = gain * w.samples[i];
        for (int t = -kHalfWidth + 1; t <= kHalfWidth; ++t) {
            const long long j = base + static_cast<long long>(i) + t;
            if (j < 0 || j >= static_cast<long long>(fast_len)) continue;
            row[j] += v * taps[t + kHalfWidth - 1];
        }
    }
    return true;
}

struct SynthesisOptions {
    bool sinc_interpolation = false;
    unsigned max_workers = 0; // 0: hardware concurrency
};

struct SynthesisResult {
    DataCube h;
    DataCube v;
    std::size_t excluded_scatterers = 0; // beyond the unambiguous PRI window
    std::vector<std::string> notes;
};

namespace detail {

/// Per-scatterer, per-instant channel response against the whole array:
/// transmit illumination summed coherently over elements and receive gains
/// per element, each split into the direct and ground-reflected component so
/// the four round-trip combinations keep their own envelope delays.
struct ScattererResponse {
    cd illum_h_direct{0.0, 0.0}, illum_h_reflected{0.0, 0.0};
    cd illum_v_direct{0.0, 0.0}, illum_v_reflected{0.0, 0.0};
    std::vector<cd> rx_h_direct, rx_h_reflected;
    std::vector<cd> rx_v_direct, rx_v_reflected;
    double center_direct_m = 0.0;    // array-center reference path lengths
    double center_reflected_m = 0.0; // (set the fast-time envelope delays)
    bool reflected = false;
};

inline ScattererResponse scatterer_response(const Vec3& pos, const Scene& scene,
                                            const std::vector<Vec3>& elements, double k) {
    ScattererResponse r;
    const std::size_t n = elements.size();
    r.rx_h_direct.resize(n);
    r.rx_v_direct.resize(n);
    r.reflected = scene.ground.reflects();
    if (r.reflected) {
        r.rx_h_reflected.resize(n);
        r.rx_v_reflected.resize(n);
    }

    const PathPair center_path = two_ray_paths(scene.uca.center, pos);
    r.center_direct_m = center_path.r_direct_m;
    r.center_reflected_m = center_path.r_reflected_m;

    for (std::size_t i = 0; i < n; ++i) {
        const PathPair path = two_ray_paths(elements[i], pos);
        const cd w = scene.uca.beam_weights[i];
        const cd u_direct = std::polar(1.0 / (kSqrt4Pi * path.r_direct_m),
                                       -k * path.r_direct_m);
        r.rx_h_direct[i] = u_direct;
        r.rx_v_direct[i] = u_direct;
        r.illum_h_direct += w * u_direct;
        r.illum_v_direct += w * u_direct;
        if (r.reflected) {
            const auto [gamma_h, gamma_v] = fresnel_gamma(path.grazing_rad, scene.ground);
            const cd u_reflected = std::polar(1.0 / (kSqrt4Pi * path.r_reflected_m),
                                              -k * path.r_reflected_m);
            r.rx_h_reflected[i] = gamma_h * u_reflected;
            r.rx_v_reflected[i] = gamma_v * u_reflected;
            r.illum_h_reflected += w * gamma_h * u_reflected;
            r.illum_v_reflected += w * gamma_v * u_reflected;
        }
    }
    r.illum_h_direct *= scene.uca.element_pattern_h;
    r.illum_h_reflected *= scene.uca.element_pattern_h;
    r.illum_v_direct *= scene.uca.element_pattern_v;
    r.illum_v_reflected *= scene.uca.element_pattern_v;
    return r;
}

/// Deposits one scatterer's echo into the fast-time rows of every antenna for
/// a single packet. Returns false if the direct round trip falls outside the
/// PRI (scatterer unobservable).
inline bool deposit_scatterer(const ScattererResponse& r, const PolarimetricRcs& rcs,
                              const RadarParams& params, const WaveformSet& waveforms,
                              bool sinc_interp, DataCube& cube_h, DataCube& cube_v,
                              std::size_t packet) {
    const PulseWaveform& tx = waveforms.for_packet(packet);
    const double rx_scale = params.wavelength_m / kSqrt4Pi;
    const double bin_per_m = 1.0 / (kSpeedOfLight * params.sample_time_s);

    const cd s_hh = rcs.amp_hh(), s_hv = rcs.amp_hv();
    const cd s_vh = rcs.amp_vh(), s_vv = rcs.amp_vv();

    // Scattered amplitudes per transmit component.
    const cd a_h_tx[2] = {s_hh * r.illum_h_direct + s_hv * r.illum_v_direct,
                          s_hh * r.illum_h_reflected + s_hv * r.illum_v_reflected};
    const cd a_v_tx[2] = {s_vh * r.illum_h_direct + s_vv * r.illum_v_direct,
                          s_vh * r.illum_h_reflected + s_vv * r.illum_v_reflected};
    const double leg_m[2] = {r.center_direct_m, r.center_reflected_m};

    bool visible = false;
    const int n_legs = r.reflected ? 2 : 1;
    for (std::size_t ant = 0; ant < cube_h.n_antennas; ++ant) {
        cd* row_h = cube_h.row(ant, packet);
        cd* row_v = cube_v.row(ant, packet);
        for (int tx_leg = 0; tx_leg < n_legs; ++tx_leg) {
            for (int rx_leg = 0; rx_leg < n_legs; ++rx_leg) {
                const double delay = (leg_m[tx_leg] + leg_m[rx_leg]) * bin_per_m;
                const cd g_h = (rx_leg == 0 ? r.rx_h_direct[ant] : r.rx_h_reflected[ant]);
                const cd g_v = (rx_leg == 0 ? r.rx_v_direct[ant] : r.rx_v_reflected[ant]);
                const bool ok_h = deposit_waveform(row_h, cube_h.fast_len, tx,
                                                   rx_scale * a_h_tx[tx_leg] * g_h, delay,
                                                   sinc_interp);
                deposit_waveform(row_v, cube_v.fast_len, tx, rx_scale * a_v_tx[tx_leg] * g_v,
                                 delay, sinc_interp);
                if (tx_leg == 0 && rx_leg == 0 && ok_h) visible = true;
            }
        }
    }
    return visible;
}

inline void add_noise_rows(DataCube& cube, const NoiseModel& noise, std::size_t q_begin,
                           std::size_t q_end) {
    if (noise.power <= 0.0) return;
    const double sigma = std::sqrt(noise.power / 2.0);
    const auto pol_key = static_cast<std::uint64_t>(cube.pol) + 1;
    for (std::size_t ant = 0; ant < cube.n_antennas; ++ant) {
        for (std::size_t q = q_begin; q < q_end; ++q) {
            SplitMix64 rng(mix_key(noise.seed, pol_key, ant, q));
            cd* row = cube.row(ant, q);
            for (std::size_t p = 0; p < cube.fast_len; ++p) row[p] += sigma * rng.gaussian_pair();
        }
    }
}

} // namespace detail

/// Synthesizes the received H and V data cubes for the whole CPI.
///
/// Geometry is frozen within each packet (stop-and-go) and advanced between
/// packets. Per-element path lengths enter the carrier phases and spreading
/// amplitudes exactly; the fast-time envelope delay of each of the four
/// direct/reflected round-trip combinations is referenced to the array
/// center, which keeps a scatterer's energy in one range gate across the
/// aperture (narrowband array convention).
///
/// The transmitted waveforms are deposited as passed, so any per-sample
/// amplitude (sqrt of the energy per sample) must already be applied by the
/// caller. Static clutter is evaluated once and replicated across packets.
/// Noise draws are keyed by (polarization, antenna, packet), making the cube
/// independent of worker scheduling.
inline SynthesisResult synthesize_datacube(const Scene& scene, const RadarParams& params,
                                           const WaveformSet& waveforms,
                                           const NoiseModel& noise,
                                           const SynthesisOptions& options = {}) {
    scene.validate();
    noise.validate();
    const std::size_t n = scene.uca.n_elements;
    const std::size_t q_len = params.slow_time_packets;
    const std::size_t p_len = params.fast_time_samples;
    if (n == 0 || q_len == 0 || p_len == 0)
        throw InvalidArgumentError("scene and params must give positive N, P, Q");
    if (waveforms.max_active_length() > p_len)
        throw WaveformOverrunError("waveform longer than the PRI fast-time grid");

    SynthesisResult result;
    result.h = DataCube::zeros(n, q_len, p_len, Polarization::kH);
    result.v = DataCube::zeros(n, q_len, p_len, Polarization::kV);

    const std::vector<Vec3> elements = uca_positions(scene.uca);
    const double k = params.wavenumber_rad_m;

    // Static clutter: one row per waveform parity, replicated across slow time.
    const std::size_t parities = waveforms.pair_mode() ? 2 : 1;
    DataCube static_h = DataCube::zeros(n, parities, p_len, Polarization::kH);
    DataCube static_v = DataCube::zeros(n, parities, p_len, Polarization::kV);
    std::size_t excluded_clutter = 0;
    for (const auto& scatterer : scene.clutter) {
        const auto resp = detail::scatterer_response(scatterer.position, scene, elements, k);
        bool visible = true;
        for (std::size_t parity = 0; parity < parities; ++parity)
            visible = detail::deposit_scatterer(resp, scatterer.rcs, params, waveforms,
                                                options.sinc_interpolation, static_h, static_v,
                                                parity) &&
                      visible;
        if (!visible) ++excluded_clutter;
    }

    const unsigned hw = std::thread::hardware_concurrency();
    unsigned workers = options.max_workers ? options.max_workers : (hw ? hw : 1);
    workers = std::min<unsigned>(workers, 8);
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, q_len));

    std::vector<std::vector<std::uint8_t>> excluded_per_worker(
        workers, std::vector<std::uint8_t>(scene.targets.size(), 0));

    auto run_block = [&](unsigned worker, std::size_t q_begin, std::size_t q_end) {
        for (std::size_t q = q_begin; q < q_end; ++q) {
            if (!scene.clutter.empty()) {
                const std::size_t parity = q % parities;
                for (std::size_t ant = 0; ant < n; ++ant) {
                    const cd* src_h = static_h.row(ant, parity);
                    const cd* src_v = static_v.row(ant, parity);
                    cd* dst_h = result.h.row(ant, q);
                    cd* dst_v = result.v.row(ant, q);
                    for (std::size_t p = 0; p < p_len; ++p) {
                        dst_h[p] += src_h[p];
                        dst_v[p] += src_v[p];
                    }
                }
            }
            const double t = static_cast<double>(q) * params.pri_s;
            for (std::size_t m = 0; m < scene.targets.size(); ++m) {
                const Vec3 pos = target_position_at(scene.targets[m], scene.uca.center, t);
                const auto resp = detail::scatterer_response(pos, scene, elements, k);
                if (!detail::deposit_scatterer(resp, scene.targets[m].rcs, params, waveforms,
                                               options.sinc_interpolation, result.h, result.v,
                                               q))
                    excluded_per_worker[worker][m] = 1;
            }
        }
        detail::add_noise_rows(result.h, noise, q_begin, q_end);
        detail::add_noise_rows(result.v, noise, q_begin, q_end);
    };

    if (workers <= 1) {
        run_block(0, 0, q_len);
    } else {
        std::vector<std::future<void>> tasks;
        const std::size_t chunk = (q_len + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t q0 = w * chunk;
            const std::size_t q1 = std::min(q_len, q0 + chunk);
            if (q0 >= q1) break;
            tasks.push_back(std::async(std::launch::async, run_block, w, q0, q1));
        }
        for (auto& task : tasks) task.get();
    }

    std::size_t excluded_targets = 0;
    for (std::size_t m = 0; m < scene.targets.size(); ++m) {
        bool excluded = false;
        for (const auto& per_worker : excluded_per_worker)
            if (per_worker[m]) excluded = true;
        if (excluded) ++excluded_targets;
    }
    result.excluded_scatterers = excluded_targets + excluded_clutter;
    if (result.excluded_scatterers > 0)
        result.notes.push_back(std::to_string(result.excluded_scatterers) +
                               " scatterer(s) beyond the unambiguous PRI window were excluded");
    return result;
}

inline SynthesisResult synthesize_datacube(const Scene& scene, const RadarParams& params,
                                           const PulseWaveform& tx, const NoiseModel& noise,
                                           const SynthesisOptions& options = {}) {
    return synthesize_datacube(scene, params, WaveformSet{tx, std::nullopt}, noise, options);
}

} // namespace swarm5d
