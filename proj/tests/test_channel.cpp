// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "swarm5d/channel.hpp"
#include "swarm5d/config.hpp"
#include "swarm5d/geometry.hpp"
#include "swarm5d/golay.hpp"

using namespace swarm5d;

namespace {

RadarParams short_params(std::size_t q_packets) {
    return RadarParams::derive(60e9, 1.76e9, 2e-6, static_cast<double>(q_packets) * 2e-6);
}

Scene single_target_scene(double range_m, double az_deg, double el_deg, double speed,
                          double sigma_vv, double sigma_hh = 0.0) {
    Scene scene;
    scene.uca = UcaGeometry::uniform(8, 1.07, {0.0, 0.0, 20.0});
    scene.ground.mode = GroundModel::Mode::kFixed; // gamma 0: no reflections
    Target t;
    t.range0_m = range_m;
    t.azimuth_deg = az_deg;
    t.elevation_deg = el_deg;
    t.radial_speed_mps = speed;
    t.rcs.vv = sigma_vv;
    t.rcs.hh = sigma_hh;
    scene.targets.push_back(t);
    return scene;
}

} // namespace

TEST_CASE("two-ray path geometry") {
    const PathPair p = two_ray_paths({0.0, 0.0, 20.0}, {10.0, 0.0, 5.0});
    CHECK(p.r_direct_m == Catch::Approx(std::sqrt(100.0 + 225.0)));
    CHECK(p.r_reflected_m == Catch::Approx(std::sqrt(100.0 + 625.0)));
    CHECK(p.r_reflected_m >= p.r_direct_m);
    CHECK(std::sin(p.grazing_rad) == Catch::Approx(25.0 / p.r_reflected_m));
}

TEST_CASE("Fresnel reflection coefficients") {
    GroundModel ground;
    ground.mode = GroundModel::Mode::kFresnel;

    SECTION("perfect-conductor limit gives gamma_H = -1") {
        ground.relative_permittivity = {1e9, 0.0};
        const auto [gh, gv] = fresnel_gamma(deg2rad(30.0), ground);
        CHECK(gh.real() == Catch::Approx(-1.0).margin(1e-4));
        CHECK(gv.real() == Catch::Approx(1.0).margin(1e-3));
    }
    SECTION("normal incidence with eps_r = 3") {
        ground.relative_permittivity = {3.0, 0.0};
        const auto [gh, gv] = fresnel_gamma(std::numbers::pi / 2.0, ground);
        CHECK(gh.real() == Catch::Approx(-0.2679491924311227).epsilon(1e-12));
        CHECK(std::abs(gh.imag()) < 1e-15);
    }
    SECTION("frozen oracle at 40 degrees grazing, eps_r = 3") {
        ground.relative_permittivity = {3.0, 0.0};
        const auto [gh, gv] = fresnel_gamma(deg2rad(40.0), ground);
        CHECK(gh.real() == Catch::Approx(-0.414643910727207).epsilon(1e-12));
        CHECK(gv.real() == Catch::Approx(0.1076806527572567).epsilon(1e-12));
    }
    SECTION("|gamma| <= 1 over the grazing range") {
        ground.relative_permittivity = {15.0, -3.0};
        for (double deg = 1.0; deg <= 90.0; deg += 1.0) {
            const auto [gh, gv] = fresnel_gamma(deg2rad(deg), ground);
            CHECK(std::abs(gh) <= 1.0 + 1e-12);
            CHECK(std::abs(gv) <= 1.0 + 1e-12);
        }
    }
    SECTION("fixed mode returns the configured constants at any angle") {
        GroundModel fixed;
        fixed.mode = GroundModel::Mode::kFixed;
        fixed.fixed_gamma_h = {-0.3, 0.0};
        fixed.fixed_gamma_v = {0.2, 0.1};
        const auto [gh, gv] = fresnel_gamma(deg2rad(17.0), fixed);
        CHECK(gh == std::complex<double>{-0.3, 0.0});
        CHECK(gv == std::complex<double>{0.2, 0.1});
    }
    SECTION("invalid grazing angle") {
        CHECK_THROWS_AS(fresnel_gamma(0.0, ground), InvalidArgumentError);
        CHECK_THROWS_AS(fresnel_gamma(-0.1, ground), InvalidArgumentError);
    }
}

TEST_CASE("propagation gain") {
    SECTION("single path at 1 m has magnitude 1/sqrt(4 pi)") {
        const cd g = propagation_gain({1.0, 2.0, 0.5}, {0.0, 0.0}, 100.0);
        CHECK(std::abs(g) == Catch::Approx(1.0 / std::sqrt(4.0 * std::numbers::pi)));
    }
    SECTION("gamma = -1 with equal path lengths cancels exactly") {
        const cd g = propagation_gain({3.0, 3.0, 0.1}, {-1.0, 0.0}, 42.0);
        CHECK(std::abs(g) < 1e-15);
    }
    SECTION("frozen two-path oracle") {
        const double k = 2.0 * std::numbers::pi / 0.005;
        const cd g = propagation_gain({5.0, 5.4, 0.3}, {-0.3, 0.0}, k);
        CHECK(g.real() == Catch::Approx(0.04074702547844908).epsilon(1e-12));
        CHECK(std::abs(g.imag()) < 1e-12);
    }
    SECTION("non-positive direct path is invalid geometry") {
        CHECK_THROWS_AS(propagation_gain({0.0, 1.0, 0.1}, {0.0, 0.0}, 1.0),
                        InvalidArgumentError);
    }
}

TEST_CASE("datacube synthesis basics") {
    const RadarParams params = short_params(16);
    const WaveformSet wfs = make_waveform_set(false, params.amplitude());
    const Scene scene = single_target_scene(5.0, 165.0, 95.0, 0.0, 10.0);

    const SynthesisResult r = synthesize_datacube(scene, params, wfs.a, {});
    REQUIRE(r.h.n_antennas == 8);
    REQUIRE(r.v.slow_len == 16);
    REQUIRE(r.v.fast_len == 3520);

    SECTION("energy lands at the center-referenced delay bin") {
        // round(2 * 5 m / (c * T_s)) = 59
        const cd* row = r.v.row(0, 0);
        double before = 0.0, inside = 0.0;
        for (std::size_t p = 0; p < 59; ++p) before += std::abs(row[p]);
        for (std::size_t p = 59; p < 59 + 512; ++p) inside += std::abs(row[p]);
        CHECK(before == 0.0);
        CHECK(inside > 0.0);
        CHECK(std::abs(row[59]) == Catch::Approx(std::abs(row[59 + 511])));
        CHECK(std::abs(row[59 + 512]) == 0.0);
    }

    SECTION("static target: identical rows across slow time") {
        for (std::size_t q = 1; q < r.v.slow_len; ++q)
            for (std::size_t p = 0; p < r.v.fast_len; ++p)
                REQUIRE(r.v.at(0, q, p) == r.v.at(0, 0, p));
    }

    SECTION("column equals the waveform scaled by one complex gain") {
        const cd* row = r.v.row(3, 0);
        const cd gain = row[59] / wfs.a.samples[0];
        for (std::size_t i = 0; i < 512; ++i)
            REQUIRE(std::abs(row[59 + i] - gain * wfs.a.samples[i]) < 1e-15);
    }

    SECTION("H cube sees nothing when sigma_hh = sigma_hv = 0") {
        for (const auto& v : r.h.data) REQUIRE(v == cd{0.0, 0.0});
    }
}

TEST_CASE("approaching target advances the slow-time phase at the Doppler rate") {
    RadarParams params = short_params(16);
    Scene scene = single_target_scene(5.0, 30.0, 120.0, 4.0, 10.0);
    // small ring: per-element radial rates collapse to the bulk rate
    scene.uca = UcaGeometry::uniform(8, half_wavelength_uca_radius(8, params.wavelength_m),
                                     {0.0, 0.0, 20.0});
    const WaveformSet wfs = make_waveform_set(false, 1.0);
    const SynthesisResult r = synthesize_datacube(scene, params, wfs.a, {});

    const double expected = 2.0 * 4.0 / params.wavelength_m; // about 1601 Hz
    const cd ratio = r.v.at(0, 1, 59) / r.v.at(0, 0, 59);
    const double measured = std::arg(ratio) / (2.0 * std::numbers::pi * params.pri_s);
    CHECK(measured == Catch::Approx(expected).epsilon(1e-3));
    CHECK(measured > 0.0); // approaching targets produce positive Doppler
}

TEST_CASE("synthesis linearity and superposition") {
    const RadarParams params = short_params(4);
    const WaveformSet wfs = make_waveform_set(false, 1.0);

    const Scene s1 = single_target_scene(5.0, 165.0, 95.0, 4.0, 10.0, 2.0);
    const Scene s2 = single_target_scene(10.0, 120.0, 130.0, 18.0, 5.0, 1.0);
    Scene both = s1;
    both.targets.push_back(s2.targets[0]);

    const auto r1 = synthesize_datacube(s1, params, wfs.a, {});
    const auto r2 = synthesize_datacube(s2, params, wfs.a, {});
    const auto rb = synthesize_datacube(both, params, wfs.a, {});

    SECTION("superposition to 1e-12 relative") {
        double max_err = 0.0, max_mag = 0.0;
        for (std::size_t i = 0; i < rb.v.data.size(); ++i) {
            max_err = std::max(max_err, std::abs(rb.v.data[i] - (r1.v.data[i] + r2.v.data[i])));
            max_mag = std::max(max_mag, std::abs(rb.v.data[i]));
        }
        CHECK(max_err <= 1e-12 * max_mag);
    }

    SECTION("scaling the amplitude scales every sample exactly") {
        const WaveformSet scaled = make_waveform_set(false, 3.0);
        const auto rs = synthesize_datacube(s1, params, scaled.a, {});
        double max_err = 0.0, max_mag = 0.0;
        for (std::size_t i = 0; i < rs.v.data.size(); ++i) {
            max_err = std::max(max_err, std::abs(rs.v.data[i] - 3.0 * r1.v.data[i]));
            max_mag = std::max(max_mag, std::abs(rs.v.data[i]));
        }
        CHECK(max_err <= 1e-12 * max_mag);
    }
}

TEST_CASE("cross-polarization reciprocity") {
    const RadarParams params = short_params(2);
    const WaveformSet wfs = make_waveform_set(false, 1.0);

    Scene v_to_h = single_target_scene(7.0, 40.0, 110.0, 0.0, 0.0);
    v_to_h.targets[0].rcs.hv = 0.6; // scatters V illumination into H
    Scene h_to_v = v_to_h;
    h_to_v.targets[0].rcs.hv = 0.0;
    h_to_v.targets[0].rcs.vh = 0.6; // mirrored coupling

    const auto ra = synthesize_datacube(v_to_h, params, wfs.a, {});
    const auto rb = synthesize_datacube(h_to_v, params, wfs.a, {});
    for (std::size_t i = 0; i < ra.h.data.size(); ++i) {
        REQUIRE(std::abs(ra.h.data[i] - rb.v.data[i]) < 1e-15);
        REQUIRE(ra.v.data[i] == cd{0.0, 0.0});
        REQUIRE(rb.h.data[i] == cd{0.0, 0.0});
    }
}

TEST_CASE("noise determinism and statistics") {
    const RadarParams params = short_params(8);
    const WaveformSet wfs = make_waveform_set(false, 1.0);
    Scene scene = single_target_scene(5.0, 0.0, 95.0, 0.0, 1.0);
    const NoiseModel noise{2.5e-3, 12345};

    SECTION("identical seeds give byte-identical cubes") {
        const auto a = synthesize_datacube(scene, params, wfs.a, noise);
        const auto b = synthesize_datacube(scene, params, wfs.a, noise);
        REQUIRE(a.v.data == b.v.data);
        REQUIRE(a.h.data == b.h.data);
    }
    SECTION("result does not depend on the worker count") {
        SynthesisOptions serial;
        serial.max_workers = 1;
        SynthesisOptions wide;
        wide.max_workers = 8;
        const auto a = synthesize_datacube(scene, params, wfs.a, noise, serial);
        const auto b = synthesize_datacube(scene, params, wfs.a, noise, wide);
        REQUIRE(a.v.data == b.v.data);
    }
    SECTION("sample variance approaches the configured power") {
        Scene empty = scene;
        empty.targets.clear();
        const auto r = synthesize_datacube(empty, params, wfs.a, noise);
        double acc = 0.0;
        for (const auto& v : r.v.data) acc += std::norm(v);
        const double variance = acc / static_cast<double>(r.v.data.size());
        CHECK(variance == Catch::Approx(noise.power).epsilon(0.02));
    }
    SECTION("negative power rejected") {
        CHECK_THROWS_AS(synthesize_datacube(scene, params, wfs.a, NoiseModel{-1.0, 0}),
                        InvalidArgumentError);
    }
}

TEST_CASE("scatterers beyond the PRI window are excluded and reported") {
    const RadarParams params = short_params(2);
    // round trip of 400 m = 2667 ns exceeds the 2 us PRI
    const Scene scene = single_target_scene(400.0, 0.0, 91.0, 0.0, 1.0);
    const WaveformSet wfs = make_waveform_set(false, 1.0);
    const auto r = synthesize_datacube(scene, params, wfs.a, {});
    CHECK(r.excluded_scatterers == 1);
    REQUIRE_FALSE(r.notes.empty());
    for (const auto& v : r.v.data) REQUIRE(v == cd{0.0, 0.0});
}

TEST_CASE("ground reflections add delayed replicas") {
    RadarParams params = short_params(4);
    Scene scene = single_target_scene(10.0, 0.0, 120.0, 0.0, 4.0);
    scene.uca = UcaGeometry::uniform(8, 1.07, {0.0, 0.0, 10.0});
    scene.ground.mode = GroundModel::Mode::kFixed;
    scene.ground.fixed_gamma_h = {-0.3, 0.0};
    scene.ground.fixed_gamma_v = {-0.3, 0.0};
    const WaveformSet wfs = make_waveform_set(false, 1.0);
    const auto with_ground = synthesize_datacube(scene, params, wfs.a, {});

    scene.ground.fixed_gamma_h = {0.0, 0.0};
    scene.ground.fixed_gamma_v = {0.0, 0.0};
    const auto without = synthesize_datacube(scene, params, wfs.a, {});

    // direct-only cube dies right after the direct echo; the two-ray cube
    // still has energy at later delays (mixed and double-bounce paths)
    const std::size_t direct_bin = 117; // round(2 * 10 / (c T_s))
    const cd* row_g = with_ground.v.row(0, 0);
    const cd* row_0 = without.v.row(0, 0);
    double late_g = 0.0, late_0 = 0.0;
    for (std::size_t p = direct_bin + 512 + 8; p < params.fast_time_samples; ++p) {
        late_g += std::abs(row_g[p]);
        late_0 += std::abs(row_0[p]);
    }
    CHECK(late_0 == 0.0);
    CHECK(late_g > 0.0);
}
