// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "swarm5d/errors.hpp"
#include "swarm5d/rng.hpp"

namespace swarm5d {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }

    /// Mirror image across the ground plane z = 0.
    Vec3 ground_image() const { return {x, y, -z}; }
};

inline double deg2rad(double d) { return d * std::numbers::pi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / std::numbers::pi; }

/// Spherical convention: azimuth from +x in the xy-plane, elevation measured
/// from the +z axis (polar angle). Elevation 90 deg lies in the horizontal
/// plane; angles above 90 deg point below it.
inline Vec3 spherical_to_cartesian(double range_m, double azimuth_deg, double elevation_deg) {
    if (range_m < 0.0) throw InvalidArgumentError("range must be non-negative");
    const double az = deg2rad(azimuth_deg);
    const double el = deg2rad(elevation_deg);
    const double s = std::sin(el);
    return {range_m * s * std::cos(az), range_m * s * std::sin(az), range_m * std::cos(el)};
}

struct Spherical {
    double range_m = 0.0;
    double azimuth_deg = 0.0;
    double elevation_deg = 0.0;
};

inline Spherical cartesian_to_spherical(const Vec3& p) {
    const double r = p.norm();
    if (r == 0.0) throw UndefinedAnglesError("angles are undefined at the origin");
    return {r, rad2deg(std::atan2(p.y, p.x)), rad2deg(std::acos(p.z / r))};
}

/// Polarimetric radar cross-section. The four components are powers in square
/// meters; the scattering matrix entries are their square roots with the
/// stored phases (zero by default).
struct PolarimetricRcs {
    double hh = 0.0, hv = 0.0, vh = 0.0, vv = 0.0; // m^2
    double phase_hh = 0.0, phase_hv = 0.0, phase_vh = 0.0, phase_vv = 0.0; // rad

    std::complex<double> amp_hh() const { return std::polar(std::sqrt(hh), phase_hh); }
    std::complex<double> amp_hv() const { return std::polar(std::sqrt(hv), phase_hv); }
    std::complex<double> amp_vh() const { return std::polar(std::sqrt(vh), phase_vh); }
    std::complex<double> amp_vv() const { return std::polar(std::sqrt(vv), phase_vv); }

    void validate() const {
        if (hh < 0.0 || hv < 0.0 || vh < 0.0 || vv < 0.0)
            throw InvalidArgumentError("RCS components must be non-negative");
    }
};

/// The UAV swarm as a uniform circular antenna array: N elements on a circle
/// of the given radius around `center`, all sharing the center height.
struct UcaGeometry {
    std::size_t n_elements = 0;
    double radius_m = 0.0;
    Vec3 center;
    std::vector<double> element_azimuths_rad;          // positions on the circle, increasing in [0, 2pi)
    std::vector<std::complex<double>> beam_weights;    // w, default all-ones (quasi-omni)
    double element_pattern_h = 1.0;                    // xi_H
    double element_pattern_v = 1.0;                    // xi_V

    static UcaGeometry uniform(std::size_t n, double radius_m, Vec3 center) {
        UcaGeometry g;
        g.n_elements = n;
        g.radius_m = radius_m;
        g.center = center;
        g.element_azimuths_rad.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            g.element_azimuths_rad[i] = 2.0 * std::numbers::pi * static_cast<double>(i) /
                                        static_cast<double>(n);
        g.beam_weights.assign(n, {1.0, 0.0});
        return g;
    }

    void validate() const {
        if (n_elements < 1) throw InvalidArgumentError("UCA needs at least one element");
        if (radius_m < 0.0) throw InvalidArgumentError("UCA radius must be non-negative");
        if (element_azimuths_rad.size() != n_elements)
            throw InvalidArgumentError("element azimuth count must equal n_elements");
        for (std::size_t i = 0; i < n_elements; ++i) {
            const double a = element_azimuths_rad[i];
            if (a < 0.0 || a >= 2.0 * std::numbers::pi)
                throw InvalidArgumentError("element azimuths must lie in [0, 2pi)");
            if (i > 0 && a <= element_azimuths_rad[i - 1])
                throw InvalidArgumentError("element azimuths must be strictly increasing");
        }
        if (beam_weights.size() != n_elements)
            throw InvalidArgumentError("beam weight count must equal n_elements");
        for (const auto& w : beam_weights)
            if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
                throw InvalidArgumentError("beam weights must be finite");
    }
};

/// Element positions: center + radius * (cos phi_n, sin phi_n, 0). The array
/// plane is horizontal at the center height.
inline std::vector<Vec3> uca_positions(const UcaGeometry& g) {
    g.validate();
    std::vector<Vec3> out;
    out.reserve(g.n_elements);
    for (double phi : g.element_azimuths_rad)
        out.push_back(g.center + Vec3{g.radius_m * std::cos(phi), g.radius_m * std::sin(phi), 0.0});
    return out;
}

/// Point target: spherical position at t = 0 relative to the array center and
/// a constant radial speed (positive toward the center).
struct Target {
    double range0_m = 0.0;
    double azimuth_deg = 0.0;
    double elevation_deg = 0.0;
    double radial_speed_mps = 0.0;
    PolarimetricRcs rcs;

    void validate() const {
        if (range0_m <= 0.0) throw InvalidArgumentError("target range must be positive");
        if (!std::isfinite(radial_speed_mps))
            throw InvalidArgumentError("target radial speed must be finite");
        rcs.validate();
    }
};

inline double target_range_at(const Target& t, double time_s) {
    const double r = t.range0_m - t.radial_speed_mps * time_s;
    if (r <= 0.0)
        throw TargetOverrunError("target range reached zero at t = " + std::to_string(time_s) +
                                 " s");
    return r;
}

/// Absolute position at slow time t: range shrinks at the radial speed,
/// angles stay fixed.
inline Vec3 target_position_at(const Target& t, const Vec3& array_center, double time_s) {
    return array_center +
           spherical_to_cartesian(target_range_at(t, time_s), t.azimuth_deg, t.elevation_deg);
}

/// Static scatterer on the ground plane. Velocity is identically zero.
struct ClutterScatterer {
    Vec3 position; // z = 0
    PolarimetricRcs rcs;
};

struct GroundModel {
    enum class Mode { kFresnel, kFixed };
    Mode mode = Mode::kFixed;
    std::complex<double> relative_permittivity{3.0, 0.0};
    std::complex<double> fixed_gamma_h{0.0, 0.0};
    std::complex<double> fixed_gamma_v{0.0, 0.0};

    bool reflects() const {
        return mode == Mode::kFresnel ||
               std::abs(fixed_gamma_h) > 0.0 || std::abs(fixed_gamma_v) > 0.0;
    }

    void validate() const {
        if (mode == Mode::kFixed &&
            (std::abs(fixed_gamma_h) > 1.0 || std::abs(fixed_gamma_v) > 1.0))
            throw InvalidArgumentError("|gamma| must be <= 1 for a passive ground");
    }
};

/// Axis-aligned rectangle on the ground plane.
struct GroundPatch {
    double x_min = 0.0, x_max = 0.0;
    double y_min = 0.0, y_max = 0.0;

    double area() const { return (x_max - x_min) * (y_max - y_min); }
};

/// Draws static clutter scatterers uniformly over the patch. Scatterer count
/// is floor(density * area). RCS values are apportioned so that the aggregate
/// per range-resolution cell (annulus around the array center) equals
/// 10^(coefficient_db/10) square meters, i.e. the stated coefficient against
/// a 1 m^2 reference at equal range; within a cell every scatterer gets an
/// equal share. Fully deterministic for a given seed.
inline std::vector<ClutterScatterer> generate_clutter(const GroundPatch& patch,
                                                      double density_per_m2,
                                                      double coefficient_db,
                                                      std::uint64_t seed,
                                                      const Vec3& array_center,
                                                      double range_resolution_m) {
    if (density_per_m2 <= 0.0) throw InvalidArgumentError("clutter density must be positive");
    if (patch.area() <= 0.0) throw InvalidArgumentError("clutter patch must be non-degenerate");
    if (range_resolution_m <= 0.0)
        throw InvalidArgumentError("range resolution must be positive");

    const auto count = static_cast<std::size_t>(density_per_m2 * patch.area());
    std::vector<ClutterScatterer> out;
    if (count == 0) return out;
    out.reserve(count);

    SplitMix64 rng(seed);
    std::vector<std::size_t> cell(count);
    std::vector<std::size_t> cell_population;
    for (std::size_t i = 0; i < count; ++i) {
        ClutterScatterer s;
        s.position = {rng.uniform(patch.x_min, patch.x_max),
                      rng.uniform(patch.y_min, patch.y_max), 0.0};
        const double r = (s.position - array_center).norm();
        cell[i] = static_cast<std::size_t>(r / range_resolution_m);
        if (cell[i] >= cell_population.size()) cell_population.resize(cell[i] + 1, 0);
        ++cell_population[cell[i]];
        out.push_back(s);
    }

    const double total_sigma = std::pow(10.0, coefficient_db / 10.0); // m^2 per cell
    for (std::size_t i = 0; i < count; ++i) {
        const double sigma = total_sigma / static_cast<double>(cell_population[cell[i]]);
        out[i].rcs.hh = sigma;
        out[i].rcs.vv = sigma;
    }
    return out;
}

/// Everything the synthesizer needs to know about the world.
struct Scene {
    UcaGeometry uca;
    GroundModel ground;
    std::vector<Target> targets;
    std::vector<ClutterScatterer> clutter;

    void validate() const {
        uca.validate();
        ground.validate();
        for (const auto& t : targets) {
            t.validate();
            const Vec3 p = uca.center + spherical_to_cartesian(t.range0_m, t.azimuth_deg,
                                                               t.elevation_deg);
            if (p.z < 0.0)
                throw InvalidArgumentError("target lies below the ground plane");
        }
    }
};

} // namespace swarm5d
