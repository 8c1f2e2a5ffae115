// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

#include "swarm5d/config.hpp"

using namespace swarm5d;

namespace {

struct TempFile {
    std::filesystem::path path;
    explicit TempFile(const std::string& contents) {
        path = std::filesystem::temp_directory_path() /
               ("swarm5d_cfg_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++) + ".json");
        std::ofstream out(path);
        out << contents;
    }
    ~TempFile() { std::filesystem::remove(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

} // namespace

TEST_CASE("derived radar parameters reproduce the documented figures") {
    const RadarParams p = RadarParams::derive(60e9, 1.76e9, 2e-6, 4e-3);
    CHECK(p.wavelength_m == Catch::Approx(4.996540966e-3).epsilon(1e-9));
    CHECK(p.fast_time_samples == 3520);
    CHECK(p.slow_time_packets == 2000);
    CHECK(p.range_resolution_m == Catch::Approx(0.0852).margin(5e-4));
    CHECK(p.max_unambiguous_velocity_mps ==
          Catch::Approx(p.wavelength_m / (4.0 * p.pri_s)).epsilon(1e-15));
    CHECK(p.max_unambiguous_velocity_mps == Catch::Approx(625.0).margin(0.5));
    CHECK(p.max_unambiguous_range_m == Catch::Approx(43.6).margin(0.05));
    CHECK(p.velocity_resolution_mps == Catch::Approx(0.6246).margin(1e-3));
    CHECK(p.doppler_bin_hz == Catch::Approx(250.0));
    CHECK_THROWS_AS(RadarParams::derive(0.0, 1.0, 1.0, 1.0), InvalidArgumentError);
}

TEST_CASE("paper_fig4 preset carries the documented values") {
    const ExperimentConfig cfg = preset_paper_fig4();
    CHECK(cfg.radar.carrier_hz == 60e9);
    CHECK(cfg.radar.bandwidth_hz == 1.76e9);
    CHECK(cfg.radar.pri_s == 2e-6);
    CHECK(cfg.radar.cpi_s == 4e-3);
    CHECK(cfg.uca.n_elements == 8);
    CHECK(cfg.uca.radius_m == 1.07);
    REQUIRE(cfg.targets.size() == 3);
    CHECK(cfg.targets[0].range0_m == 5.0);
    CHECK(cfg.targets[0].radial_speed_mps == 4.0);
    CHECK(cfg.targets[0].rcs.vv == 10.0);
    CHECK(cfg.targets[2].rcs.hh == 0.2);
    CHECK(cfg.clutter.enabled);
    CHECK(cfg.clutter.coefficient_db == -5.0);
    for (const auto& t : cfg.targets) {
        CHECK(t.elevation_deg >= 90.0);
        CHECK(t.elevation_deg <= 180.0);
    }
    REQUIRE_FALSE(cfg.notes.empty());
    CHECK(preset_by_name("paper_fig4") != nullptr);
    CHECK(preset_by_name("nope") == nullptr);
}

TEST_CASE("config round-trips losslessly through serialization") {
    const ExperimentConfig cfg = preset_paper_fig4();
    const nlohmann::json j = to_json(cfg);
    const ExperimentConfig back = parse_config(j);
    CHECK(to_json(back).dump() == j.dump());
    CHECK(config_hash(back) == config_hash(cfg));
}

TEST_CASE("config hash tracks content") {
    ExperimentConfig a = preset_paper_fig4();
    ExperimentConfig b = preset_paper_fig4();
    CHECK(config_hash(a) == config_hash(b));
    b.seed = 999;
    CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("config file loading") {
    SECTION("empty file is a parse error") {
        TempFile f("");
        CHECK_THROWS_AS(load_config(f.path), ConfigError);
    }
    SECTION("missing file") {
        CHECK_THROWS_AS(load_config("/nonexistent/nowhere.json"), ConfigError);
    }
    SECTION("negative radius names the offending key") {
        TempFile f(R"({"radar": {"carrier_hz": 60e9, "bandwidth_hz": 1.76e9,
                      "pri_s": 2e-6, "cpi_s": 4e-3},
                      "scene": {"uca": {"n_elements": 8, "radius_m": -1.0}}})");
        try {
            load_config(f.path);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("scene.uca.radius") != std::string::npos);
        }
    }
    SECTION("unknown keys are rejected with their path") {
        TempFile f(R"({"radar": {"carrier_hz": 60e9, "bandwidth_hz": 1.76e9,
                      "pri_s": 2e-6, "cpi_s": 4e-3},
                      "scene": {"uca": {"n_elements": 8, "radius_m": 1.0}},
                      "procesing": {}})");
        try {
            load_config(f.path);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("procesing") != std::string::npos);
        }
    }
    SECTION("minimal valid file applies defaults") {
        TempFile f(R"({"radar": {"carrier_hz": 60e9, "bandwidth_hz": 1.76e9,
                      "pri_s": 2e-6, "cpi_s": 4e-3},
                      "scene": {"uca": {"n_elements": 8, "radius_m": 1.07}}})");
        const ExperimentConfig cfg = load_config(f.path);
        CHECK(cfg.processing.clean_max_iterations == 3);
        CHECK(cfg.processing.clean_stop_threshold_db == -30.0);
        CHECK(cfg.processing.notch_half_width_bins == 1);
        CHECK(cfg.processing.snapshot_mode == SnapshotMode::kSlowTime);
        CHECK(cfg.noise_power == 0.0);
        CHECK(cfg.targets.empty());
    }
    SECTION("bad ground mode named") {
        TempFile f(R"({"radar": {"carrier_hz": 60e9, "bandwidth_hz": 1.76e9,
                      "pri_s": 2e-6, "cpi_s": 4e-3},
                      "scene": {"uca": {"n_elements": 8, "radius_m": 1.07},
                                "ground": {"mode": "mirror"}}})");
        try {
            load_config(f.path);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("scene.ground.mode") != std::string::npos);
        }
    }
}

TEST_CASE("repo preset file stays in sync with the embedded preset") {
    const std::filesystem::path path =
        std::filesystem::path(SWARM5D_SOURCE_DIR) / "configs" / "paper_fig4.json";
    REQUIRE(std::filesystem::exists(path));
    const ExperimentConfig from_file = load_config(path);
    CHECK(to_json(from_file).dump() == to_json(preset_paper_fig4()).dump());
}

TEST_CASE("desk profile rescales timing and the array") {
    ExperimentConfig cfg = preset_paper_fig4();
    apply_profile(cfg, ScaleProfile::kDesk);
    CHECK(cfg.radar.fast_time_samples == 1024);
    CHECK(cfg.radar.slow_time_packets == 256);
    // adjacent-element spacing equals lambda/2
    const double spacing = 2.0 * cfg.uca.radius_m * std::sin(std::numbers::pi / 8.0);
    CHECK(spacing == Catch::Approx(cfg.radar.wavelength_m / 2.0).epsilon(1e-12));
    // paper profile leaves everything alone
    ExperimentConfig cfg2 = preset_paper_fig4();
    apply_profile(cfg2, ScaleProfile::kPaper);
    CHECK(cfg2.radar.fast_time_samples == 3520);
    CHECK(cfg2.uca.radius_m == 1.07);
}
