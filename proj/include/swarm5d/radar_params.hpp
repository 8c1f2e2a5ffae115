// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>

#include "swarm5d/errors.hpp"

namespace swarm5d {

inline constexpr double kSpeedOfLight = 299792458.0; // m/s

/// Length of the channel-estimation Golay waveform in samples. The usable
/// (unambiguous) correlation window of the matched filter is tied to it.
inline constexpr std::size_t kCefLength = 512;

/// Carrier/bandwidth/timing constants of the radar along with every quantity
/// derived from them. Construct through derive().
struct RadarParams {
    // inputs
    double carrier_hz = 0.0;        // f_o
    double bandwidth_hz = 0.0;      // BW; complex sample rate equals the bandwidth
    double pri_s = 0.0;             // pulse repetition interval T_P
    double cpi_s = 0.0;             // coherent processing interval T_CPI
    double energy_per_sample = 1.0; // E_s

    // derived
    double wavelength_m = 0.0;            // lambda = c / f_o
    double wavenumber_rad_m = 0.0;        // k = 2*pi / lambda
    double sample_time_s = 0.0;           // T_s = 1 / BW
    std::size_t fast_time_samples = 0;    // P = round(T_P * BW)
    std::size_t slow_time_packets = 0;    // Q = round(T_CPI / T_P)
    double range_resolution_m = 0.0;      // c / (2 BW)
    double range_bin_m = 0.0;             // c * T_s / 2 (same value, per-bin step)
    double velocity_resolution_mps = 0.0; // lambda / (2 T_CPI)
    double doppler_bin_hz = 0.0;          // 1 / T_CPI
    double max_unambiguous_velocity_mps = 0.0; // lambda / (4 T_P)
    double max_unambiguous_range_m = 0.0;      // correlation window: kCefLength * T_s * c / 2

    double amplitude() const { return std::sqrt(energy_per_sample); }

    /// Derives every dependent field from the four timing/frequency inputs.
    /// Throws InvalidArgumentError if any input is not positive.
    static RadarParams derive(double carrier_hz, double bandwidth_hz, double pri_s,
                              double cpi_s, double energy_per_sample = 1.0) {
        if (carrier_hz <= 0.0 || bandwidth_hz <= 0.0 || pri_s <= 0.0 || cpi_s <= 0.0)
            throw InvalidArgumentError("radar parameters must be positive");
        if (energy_per_sample <= 0.0)
            throw InvalidArgumentError("energy per sample must be positive");

        RadarParams p;
        p.carrier_hz = carrier_hz;
        p.bandwidth_hz = bandwidth_hz;
        p.pri_s = pri_s;
        p.cpi_s = cpi_s;
        p.energy_per_sample = energy_per_sample;

        p.wavelength_m = kSpeedOfLight / carrier_hz;
        p.wavenumber_rad_m = 2.0 * std::numbers::pi / p.wavelength_m;
        p.sample_time_s = 1.0 / bandwidth_hz;
        p.fast_time_samples = static_cast<std::size_t>(std::llround(pri_s * bandwidth_hz));
        p.slow_time_packets = static_cast<std::size_t>(std::llround(cpi_s / pri_s));
        p.range_resolution_m = kSpeedOfLight / (2.0 * bandwidth_hz);
        p.range_bin_m = kSpeedOfLight * p.sample_time_s / 2.0;
        p.velocity_resolution_mps = p.wavelength_m / (2.0 * cpi_s);
        p.doppler_bin_hz = 1.0 / cpi_s;
        p.max_unambiguous_velocity_mps = p.wavelength_m / (4.0 * pri_s);
        p.max_unambiguous_range_m =
            static_cast<double>(kCefLength) * p.sample_time_s * kSpeedOfLight / 2.0;
        return p;
    }
};

} // namespace swarm5d
