// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "swarm5d/geometry.hpp"
#include "swarm5d/rng.hpp"

using namespace swarm5d;

TEST_CASE("UCA element positions") {
    SECTION("paper ring: element 0 on the +x axis") {
        const auto g = UcaGeometry::uniform(8, 1.07, {0.0, 0.0, 20.0});
        const auto pos = uca_positions(g);
        REQUIRE(pos.size() == 8);
        CHECK(pos[0].x == Catch::Approx(1.07));
        CHECK(pos[0].y == Catch::Approx(0.0).margin(1e-12));
        CHECK(pos[0].z == Catch::Approx(20.0));
        // 45 degree spacing
        CHECK(pos[1].x == Catch::Approx(1.07 * std::sqrt(0.5)));
        CHECK(pos[1].y == Catch::Approx(1.07 * std::sqrt(0.5)));
    }
    SECTION("single element") {
        const auto pos = uca_positions(UcaGeometry::uniform(1, 0.5, {0.0, 0.0, 3.0}));
        REQUIRE(pos.size() == 1);
        CHECK(pos[0].x == Catch::Approx(0.5));
    }
    SECTION("N=4: neighbors are sqrt(2) radii apart") {
        const auto pos = uca_positions(UcaGeometry::uniform(4, 2.0, {0.0, 0.0, 0.0}));
        for (std::size_t i = 0; i < 4; ++i) {
            const double d = (pos[(i + 1) % 4] - pos[i]).norm();
            CHECK(d == Catch::Approx(2.0 * std::numbers::sqrt2));
        }
    }
    SECTION("validation") {
        UcaGeometry g = UcaGeometry::uniform(4, 1.0, {0.0, 0.0, 0.0});
        g.element_azimuths_rad[2] = g.element_azimuths_rad[1]; // not strictly increasing
        CHECK_THROWS_AS(uca_positions(g), InvalidArgumentError);
    }
}

TEST_CASE("spherical conversions") {
    SECTION("axis case: elevation 90 lies in the horizontal plane") {
        const Vec3 p = spherical_to_cartesian(1.0, 0.0, 90.0);
        CHECK(p.x == Catch::Approx(1.0));
        CHECK(p.y == Catch::Approx(0.0).margin(1e-12));
        CHECK(p.z == Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("hand-computed triple") {
        const Vec3 p = spherical_to_cartesian(5.0, 165.0, 95.0);
        CHECK(p.x == Catch::Approx(-4.81125093449529).epsilon(1e-12));
        CHECK(p.y == Catch::Approx(1.289170802481499).epsilon(1e-12));
        CHECK(p.z == Catch::Approx(-0.4357787137382912).epsilon(1e-12));
    }
    SECTION("inverse of the origin is undefined") {
        CHECK_THROWS_AS(cartesian_to_spherical({0.0, 0.0, 0.0}), UndefinedAnglesError);
    }
    SECTION("negative range rejected") {
        CHECK_THROWS_AS(spherical_to_cartesian(-1.0, 0.0, 90.0), InvalidArgumentError);
    }
    SECTION("round trip within 1e-12 relative over random draws") {
        SplitMix64 rng(42);
        for (int i = 0; i < 200; ++i) {
            const double r = rng.uniform(0.01, 100.0);
            const double az = rng.uniform(-179.9, 179.9);
            const double el = rng.uniform(0.1, 179.9);
            const Vec3 p = spherical_to_cartesian(r, az, el);
            const Spherical s = cartesian_to_spherical(p);
            CHECK(s.range_m == Catch::Approx(r).epsilon(1e-12));
            CHECK(s.azimuth_deg == Catch::Approx(az).epsilon(1e-10));
            CHECK(s.elevation_deg == Catch::Approx(el).epsilon(1e-10));
        }
    }
}

TEST_CASE("target motion") {
    Target t;
    t.range0_m = 5.0;
    t.azimuth_deg = 165.0;
    t.elevation_deg = 95.0;
    t.radial_speed_mps = 4.0;
    t.rcs.vv = 10.0;
    const Vec3 center{0.0, 0.0, 20.0};

    SECTION("initial position matches the spherical spec") {
        const Vec3 p = target_position_at(t, center, 0.0);
        CHECK((p - center).norm() == Catch::Approx(5.0));
    }
    SECTION("zero speed keeps the position constant") {
        Target still = t;
        still.radial_speed_mps = 0.0;
        const Vec3 a = target_position_at(still, center, 0.0);
        const Vec3 b = target_position_at(still, center, 3.3e-3);
        CHECK((a - b).norm() == 0.0);
    }
    SECTION("range shrinks by v * T_CPI over a CPI") {
        Target fast = t;
        fast.radial_speed_mps = 18.0;
        const double r0 = (target_position_at(fast, center, 0.0) - center).norm();
        const double r1 = (target_position_at(fast, center, 4e-3) - center).norm();
        CHECK(r0 - r1 == Catch::Approx(0.072).epsilon(1e-9));
    }
    SECTION("angles are unchanged by the motion") {
        const Spherical s = cartesian_to_spherical(target_position_at(t, center, 0.5) - center);
        CHECK(s.azimuth_deg == Catch::Approx(165.0));
        CHECK(s.elevation_deg == Catch::Approx(95.0));
    }
    SECTION("overrun") {
        CHECK_THROWS_AS(target_position_at(t, center, 2.0), TargetOverrunError);
    }
}

TEST_CASE("clutter generation") {
    const GroundPatch patch{-30.0, 30.0, -30.0, 30.0};
    const Vec3 center{0.0, 0.0, 20.0};
    const double res = 0.08516831193181817;

    SECTION("deterministic for a fixed seed") {
        const auto a = generate_clutter(patch, 0.05, -5.0, 77, center, res);
        const auto b = generate_clutter(patch, 0.05, -5.0, 77, center, res);
        REQUIRE(a.size() == b.size());
        REQUIRE(a.size() == 180);
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].position.x == b[i].position.x);
            CHECK(a[i].position.y == b[i].position.y);
            CHECK(a[i].rcs.vv == b[i].rcs.vv);
        }
    }
    SECTION("different seeds move the scatterers") {
        const auto a = generate_clutter(patch, 0.05, -5.0, 77, center, res);
        const auto b = generate_clutter(patch, 0.05, -5.0, 78, center, res);
        bool any_different = false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i].position.x != b[i].position.x) any_different = true;
        CHECK(any_different);
    }
    SECTION("scatterers stay on the ground inside the patch") {
        for (const auto& s : generate_clutter(patch, 0.05, -5.0, 3, center, res)) {
            CHECK(s.position.z == 0.0);
            CHECK(s.position.x >= patch.x_min);
            CHECK(s.position.x <= patch.x_max);
            CHECK(s.position.y >= patch.y_min);
            CHECK(s.position.y <= patch.y_max);
        }
    }
    SECTION("per-cell RCS aggregates to the clutter coefficient") {
        const auto scatterers = generate_clutter(patch, 0.05, -5.0, 9, center, res);
        // sum sigma per occupied range cell and check each equals 10^(-0.5)
        std::map<std::size_t, double> cell_sigma;
        for (const auto& s : scatterers) {
            const double r = (s.position - center).norm();
            cell_sigma[static_cast<std::size_t>(r / res)] += s.rcs.vv;
        }
        REQUIRE_FALSE(cell_sigma.empty());
        for (const auto& [cell, sigma] : cell_sigma)
            CHECK(sigma == Catch::Approx(std::pow(10.0, -0.5)).epsilon(1e-9));
    }
    SECTION("density small enough rounds to an empty field") {
        const GroundPatch tiny{0.0, 1.0, 0.0, 0.9};
        CHECK(generate_clutter(tiny, 1.0, -5.0, 1, center, res).empty());
    }
    SECTION("degenerate patch rejected") {
        CHECK_THROWS_AS(generate_clutter({1.0, 1.0, 0.0, 5.0}, 1.0, -5.0, 1, center, res),
                        InvalidArgumentError);
    }
}

TEST_CASE("scene validation flags underground targets") {
    Scene scene;
    scene.uca = UcaGeometry::uniform(8, 1.07, {0.0, 0.0, 2.0});
    Target t;
    t.range0_m = 10.0;
    t.azimuth_deg = 0.0;
    t.elevation_deg = 170.0; // z = 2 - 9.85 < 0
    t.rcs.vv = 1.0;
    scene.targets.push_back(t);
    CHECK_THROWS_AS(scene.validate(), InvalidArgumentError);
}
