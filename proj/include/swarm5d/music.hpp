// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "swarm5d/channel.hpp"
#include "swarm5d/errors.hpp"
#include "swarm5d/geometry.hpp"
#include "swarm5d/rd_processing.hpp"

namespace swarm5d {

/// Array snapshots: each column holds the N antenna samples of one snapshot.
struct SnapshotMatrix {
    std::size_t n_antennas = 0;
    std::vector<std::vector<cd>> columns;

    std::size_t count() const { return columns.size(); }
};

enum class SnapshotMode { kDopplerBin, kSlowTime };

/// Collects snapshots for one detection from a range-compressed cube.
///
/// kDopplerBin vectorizes the single (range, Doppler) cell across the N
/// antennas (one snapshot; its covariance is rank one). kSlowTime takes the
/// detection's range gate across all Q packets, removing the detection's
/// Doppler rotation, which gives a full-rank covariance under noise.
inline SnapshotMatrix gather_snapshots(const DataCube& compressed, const Detection& detection,
                                       SnapshotMode mode, const RadarParams& params) {
    if (compressed.n_antennas == 0 || compressed.slow_len == 0)
        throw DimensionError("compressed cube is empty");
    if (detection.range_bin >= compressed.fast_len)
        throw DimensionError("detection range bin outside the cube");

    SnapshotMatrix snap;
    snap.n_antennas = compressed.n_antennas;

    if (mode == SnapshotMode::kDopplerBin) {
        if (detection.doppler_bin >= compressed.slow_len)
            throw DimensionError("detection Doppler bin outside the cube");
        const auto center = static_cast<double>(compressed.slow_len / 2);
        const double u = static_cast<double>(detection.doppler_bin) - center;
        std::vector<cd> col(snap.n_antennas, cd{0.0, 0.0});
        for (std::size_t ant = 0; ant < snap.n_antennas; ++ant) {
            cd acc{0.0, 0.0};
            for (std::size_t q = 0; q < compressed.slow_len; ++q) {
                const double phase = -2.0 * std::numbers::pi * u * static_cast<double>(q) /
                                     static_cast<double>(compressed.slow_len);
                acc += compressed.at(ant, q, detection.range_bin) * std::polar(1.0, phase);
            }
            col[ant] = acc;
        }
        snap.columns.push_back(std::move(col));
        return snap;
    }

    snap.columns.reserve(compressed.slow_len);
    for (std::size_t q = 0; q < compressed.slow_len; ++q) {
        const cd derotate = std::polar(1.0, -2.0 * std::numbers::pi * detection.doppler_hz *
                                                static_cast<double>(q) * params.pri_s);
        std::vector<cd> col(snap.n_antennas);
        for (std::size_t ant = 0; ant < snap.n_antennas; ++ant)
            col[ant] = compressed.at(ant, q, detection.range_bin) * derotate;
        snap.columns.push_back(std::move(col));
    }
    return snap;
}

/// Sample covariance B = (1/count) sum x x^H. Hermitian positive
/// semidefinite by construction.
inline Eigen::MatrixXcd covariance(const SnapshotMatrix& snapshots) {
    if (snapshots.count() < 1) throw InvalidArgumentError("covariance needs >= 1 snapshot");
    const auto n = static_cast<Eigen::Index>(snapshots.n_antennas);
    Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(n, n);
    Eigen::VectorXcd x(n);
    for (const auto& col : snapshots.columns) {
        if (col.size() != snapshots.n_antennas)
            throw DimensionError("snapshot column length mismatch");
        for (Eigen::Index i = 0; i < n; ++i) x(i) = col[static_cast<std::size_t>(i)];
        b += x * x.adjoint();
    }
    b /= static_cast<double>(snapshots.count());
    return (b + b.adjoint()) / 2.0;
}

/// Orthonormal basis of the noise subspace: the eigenvectors of the N - S
/// smallest eigenvalues of the covariance.
inline Eigen::MatrixXcd noise_subspace(const Eigen::MatrixXcd& cov, std::size_t n_sources) {
    const auto n = cov.rows();
    if (cov.cols() != n) throw DimensionError("covariance must be square");
    if (n_sources < 1 || static_cast<Eigen::Index>(n_sources) >= n)
        throw InvalidArgumentError("need 1 <= n_sources < N");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(cov);
    if (solver.info() != Eigen::Success)
        throw ProcessingError("eigendecomposition of the covariance failed");
    // eigenvalues ascend, so the leading columns span the noise subspace
    return solver.eigenvectors().leftCols(n - static_cast<Eigen::Index>(n_sources));
}

/// UCA steering vector: alpha[n] = exp(j k a sin(el) cos(az - phi_n)) with a
/// the array radius and phi_n the element's position on the circle. Unit
/// magnitude per entry; all ones when sin(el) = 0 (along the array normal).
inline std::vector<cd> steering_vector(double azimuth_deg, double elevation_deg,
                                       const UcaGeometry& geometry, double wavenumber_rad_m) {
    const double az = deg2rad(azimuth_deg);
    const double sin_el = std::sin(deg2rad(elevation_deg));
    std::vector<cd> alpha(geometry.n_elements);
    for (std::size_t i = 0; i < geometry.n_elements; ++i) {
        const double phase = wavenumber_rad_m * geometry.radius_m * sin_el *
                             std::cos(az - geometry.element_azimuths_rad[i]);
        alpha[i] = std::polar(1.0, phase);
    }
    return alpha;
}

struct MusicGridSpec {
    double azimuth_min_deg = -180.0;
    double azimuth_max_deg = 180.0;
    double azimuth_step_deg = 1.0;
    double elevation_min_deg = 90.0;
    double elevation_max_deg = 180.0;
    double elevation_step_deg = 1.0;
};

/// MUSIC pseudo-spectrum over the (azimuth, elevation) grid plus its argmax.
struct MusicGrid {
    std::vector<double> azimuth_deg;
    std::vector<double> elevation_deg;
    std::vector<double> spectrum; // [elevation][azimuth]
    double peak_azimuth_deg = 0.0;
    double peak_elevation_deg = 0.0;
    double peak_value = 0.0;
    bool near_singular_peak = false; // denominator clamped somewhere

    double at(std::size_t el_index, std::size_t az_index) const {
        return spectrum[el_index * azimuth_deg.size() + az_index];
    }
};

/// Evaluates P(az, el) = 1 / ||E^H alpha||^2 over the full grid and extracts
/// the argmax. Denominators below 1e-18 are clamped and flagged.
inline MusicGrid music_spectrum(const Eigen::MatrixXcd& noise_basis, const UcaGeometry& geometry,
                                double wavenumber_rad_m, const MusicGridSpec& spec = {}) {
    const auto n = static_cast<Eigen::Index>(geometry.n_elements);
    if (noise_basis.rows() != n) throw DimensionError("noise basis rows must equal N");
    if (spec.azimuth_step_deg <= 0.0 || spec.elevation_step_deg <= 0.0)
        throw InvalidArgumentError("grid steps must be positive");

    MusicGrid grid;
    for (double a = spec.azimuth_min_deg; a <= spec.azimuth_max_deg + 1e-9;
         a += spec.azimuth_step_deg)
        grid.azimuth_deg.push_back(a);
    for (double e = spec.elevation_min_deg; e <= spec.elevation_max_deg + 1e-9;
         e += spec.elevation_step_deg)
        grid.elevation_deg.push_back(e);
    grid.spectrum.assign(grid.azimuth_deg.size() * grid.elevation_deg.size(), 0.0);

    constexpr double kDenominatorFloor = 1e-18;
    Eigen::VectorXcd alpha(n);
    for (std::size_t ei = 0; ei < grid.elevation_deg.size(); ++ei) {
        for (std::size_t ai = 0; ai < grid.azimuth_deg.size(); ++ai) {
            const auto sv = steering_vector(grid.azimuth_deg[ai], grid.elevation_deg[ei],
                                            geometry, wavenumber_rad_m);
            for (Eigen::Index i = 0; i < n; ++i) alpha(i) = sv[static_cast<std::size_t>(i)];
            double den = (noise_basis.adjoint() * alpha).squaredNorm();
            if (den < kDenominatorFloor) {
                den = kDenominatorFloor;
                grid.near_singular_peak = true;
            }
            const double value = 1.0 / den;
            grid.spectrum[ei * grid.azimuth_deg.size() + ai] = value;
            if (value > grid.peak_value) {
                grid.peak_value = value;
                grid.peak_azimuth_deg = grid.azimuth_deg[ai];
                grid.peak_elevation_deg = grid.elevation_deg[ei];
            }
        }
    }
    return grid;
}

} // namespace swarm5d
