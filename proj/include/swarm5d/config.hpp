// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "swarm5d/channel.hpp"
#include "swarm5d/errors.hpp"
#include "swarm5d/geometry.hpp"
#include "swarm5d/music.hpp"
#include "swarm5d/radar_params.hpp"
#include "swarm5d/rd_processing.hpp"

namespace swarm5d {

enum class WaveformMode { kSingleGu, kComplementaryPair };
enum class ScaleProfile { kPaper, kDesk };

struct ClutterConfig {
    bool enabled = false;
    GroundPatch patch{-30.0, 30.0, -30.0, 30.0};
    double density_per_m2 = 0.05;
    double coefficient_db = -5.0;
};

struct ProcessingConfig {
    std::size_t clean_max_iterations = 3;
    double clean_stop_threshold_db = -30.0;
    std::size_t notch_half_width_bins = 1;
    SnapshotMode snapshot_mode = SnapshotMode::kSlowTime;
    double azimuth_step_deg = 1.0;
    double elevation_step_deg = 1.0;
    bool hann_window = false;
    bool sinc_interpolation = false;
    WaveformMode waveform_mode = WaveformMode::kSingleGu;
};

struct ExportConfig {
    bool cubes = false;
    std::size_t range_window_bins = 0; // 0: the correlation window (kCefLength bins)
};

/// Full description of one experiment. All randomness (noise, clutter
/// placement, scattering phases) flows from the root seed through named
/// substreams.
struct ExperimentConfig {
    std::uint64_t seed = 1;
    RadarParams radar = RadarParams::derive(60e9, 1.76e9, 2e-6, 4e-3);
    UcaGeometry uca = UcaGeometry::uniform(8, 1.07, Vec3{0.0, 0.0, 20.0});
    GroundModel ground;
    std::vector<Target> targets;
    ClutterConfig clutter;
    bool random_rcs_phases = false;
    ProcessingConfig processing;
    double noise_power = 0.0;
    ExportConfig export_cfg;
    ScaleProfile profile = ScaleProfile::kPaper;
    std::vector<std::string> notes; // carried into the run report
};

/// Scales an element ring so adjacent elements sit half a wavelength apart
/// (unambiguous steering manifold).
inline double half_wavelength_uca_radius(std::size_t n_elements, double wavelength_m) {
    return wavelength_m / (4.0 * std::sin(std::numbers::pi / static_cast<double>(n_elements)));
}

/// Applies a scale profile on top of a loaded config. "paper" leaves the
/// config untouched. "desk" shrinks the PRI to 1024 fast-time samples and
/// the CPI to 256 packets, and rescales the array radius for half-wavelength
/// element spacing, keeping everything else.
inline void apply_profile(ExperimentConfig& cfg, ScaleProfile profile) {
    cfg.profile = profile;
    if (profile == ScaleProfile::kPaper) return;
    const double pri = 1024.0 / cfg.radar.bandwidth_hz;
    cfg.radar = RadarParams::derive(cfg.radar.carrier_hz, cfg.radar.bandwidth_hz, pri,
                                    256.0 * pri, cfg.radar.energy_per_sample);
    cfg.uca.radius_m = half_wavelength_uca_radius(cfg.uca.n_elements, cfg.radar.wavelength_m);
}

/// Scene of the bundled "paper_fig4" preset: the 8-element, 1.07 m ring at
/// 20 m height, three approaching point targets, -5 dB ground clutter, and
/// the 60 GHz / 1.76 GHz / 2 us / 4 ms timing set. Target elevations sit
/// inside the [90, 180] degree search space. Ground reflections default off
/// (fixed gamma 0); enable them via the ground block for two-ray studies.
inline ExperimentConfig preset_paper_fig4() {
    ExperimentConfig cfg;
    cfg.seed = 1;
    cfg.radar = RadarParams::derive(60e9, 1.76e9, 2e-6, 4e-3, 1.0);
    cfg.uca = UcaGeometry::uniform(8, 1.07, Vec3{0.0, 0.0, 20.0});
    cfg.ground.mode = GroundModel::Mode::kFixed;
    cfg.ground.fixed_gamma_h = {0.0, 0.0};
    cfg.ground.fixed_gamma_v = {0.0, 0.0};

    Target t1;
    t1.range0_m = 5.0;
    t1.azimuth_deg = 165.0;
    t1.elevation_deg = 95.0;
    t1.radial_speed_mps = 4.0;
    t1.rcs.vv = 10.0;
    t1.rcs.hh = 2.0;
    Target t2;
    t2.range0_m = 10.0;
    t2.azimuth_deg = 120.0;
    t2.elevation_deg = 130.0;
    t2.radial_speed_mps = 18.0;
    t2.rcs.vv = 5.0;
    t2.rcs.hh = 1.0;
    Target t3;
    t3.range0_m = 15.0;
    t3.azimuth_deg = 150.0;
    t3.elevation_deg = 110.0;
    t3.radial_speed_mps = 10.0;
    t3.rcs.vv = 1.0;
    t3.rcs.hh = 0.2;
    cfg.targets = {t1, t2, t3};

    cfg.clutter.enabled = true;
    cfg.clutter.patch = {-30.0, 30.0, -30.0, 30.0};
    cfg.clutter.density_per_m2 = 0.05;
    cfg.clutter.coefficient_db = -5.0;

    cfg.processing.clean_max_iterations = 3;
    // The weakest target sits about -33 dB under the strongest after the
    // coherent transmit sum over the ring, so the stop gate needs headroom
    // beyond the -30 dB library default.
    cfg.processing.clean_stop_threshold_db = -40.0;
    cfg.processing.notch_half_width_bins = 1;

    cfg.noise_power = 0.0;
    cfg.notes.push_back(
        "scene elevations (95, 130, 110 deg) are placed inside the [90, 180] deg "
        "elevation search space; two of the original scene angles fell outside it");
    return cfg;
}

inline const ExperimentConfig* preset_by_name(const std::string& name) {
    static const ExperimentConfig paper_fig4 = preset_paper_fig4();
    if (name == "paper_fig4") return &paper_fig4;
    return nullptr;
}

// ---------------------------------------------------------------------------
// JSON serialization. Canonical form: every field emitted, keys sorted by
// nlohmann's object ordering, numbers in shortest round-trip form. The hash
// of that form identifies the experiment.
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::json complex_to_json(const cd& z) {
    return nlohmann::json::array({z.real(), z.imag()});
}

inline cd complex_from_json(const nlohmann::json& j, const std::string& key) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ConfigError(key, "expected [real, imag]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline void require_keys(const nlohmann::json& j, const std::string& path,
                         const std::set<std::string>& allowed) {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    for (const auto& item : j.items())
        if (!allowed.count(item.key()))
            throw ConfigError(path.empty() ? item.key() : path + "." + item.key(),
                              "unknown key");
}

template <typename T>
T get_or(const nlohmann::json& j, const std::string& key, const std::string& path, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(path.empty() ? key : path + "." + key, "wrong type");
    }
}

} // namespace detail

inline nlohmann::json to_json(const ExperimentConfig& cfg) {
    using nlohmann::json;
    json j;
    j["seed"] = cfg.seed;
    j["radar"] = {{"carrier_hz", cfg.radar.carrier_hz},
                  {"bandwidth_hz", cfg.radar.bandwidth_hz},
                  {"pri_s", cfg.radar.pri_s},
                  {"cpi_s", cfg.radar.cpi_s},
                  {"energy_per_sample", cfg.radar.energy_per_sample}};

    json uca;
    uca["n_elements"] = cfg.uca.n_elements;
    uca["radius_m"] = cfg.uca.radius_m;
    uca["center"] = {cfg.uca.center.x, cfg.uca.center.y, cfg.uca.center.z};
    uca["element_pattern_h"] = cfg.uca.element_pattern_h;
    uca["element_pattern_v"] = cfg.uca.element_pattern_v;
    json azimuths = json::array();
    for (double a : cfg.uca.element_azimuths_rad) azimuths.push_back(rad2deg(a));
    uca["element_azimuths_deg"] = azimuths;
    json weights = json::array();
    for (const auto& w : cfg.uca.beam_weights) weights.push_back(detail::complex_to_json(w));
    uca["beam_weights"] = weights;

    json ground;
    ground["mode"] = cfg.ground.mode == GroundModel::Mode::kFresnel ? "fresnel" : "fixed";
    ground["relative_permittivity"] = detail::complex_to_json(cfg.ground.relative_permittivity);
    ground["gamma_h"] = detail::complex_to_json(cfg.ground.fixed_gamma_h);
    ground["gamma_v"] = detail::complex_to_json(cfg.ground.fixed_gamma_v);

    json targets = json::array();
    for (const auto& t : cfg.targets) {
        json jt;
        jt["range_m"] = t.range0_m;
        jt["azimuth_deg"] = t.azimuth_deg;
        jt["elevation_deg"] = t.elevation_deg;
        jt["radial_speed_mps"] = t.radial_speed_mps;
        jt["rcs"] = {{"hh", t.rcs.hh}, {"hv", t.rcs.hv}, {"vh", t.rcs.vh}, {"vv", t.rcs.vv}};
        targets.push_back(jt);
    }

    json clutter;
    clutter["enabled"] = cfg.clutter.enabled;
    clutter["patch"] = {{"x_min", cfg.clutter.patch.x_min},
                        {"x_max", cfg.clutter.patch.x_max},
                        {"y_min", cfg.clutter.patch.y_min},
                        {"y_max", cfg.clutter.patch.y_max}};
    clutter["density_per_m2"] = cfg.clutter.density_per_m2;
    clutter["coefficient_db"] = cfg.clutter.coefficient_db;

    j["scene"] = {{"uca", uca},
                  {"ground", ground},
                  {"targets", targets},
                  {"clutter", clutter},
                  {"random_rcs_phases", cfg.random_rcs_phases}};

    j["processing"] = {
        {"clean_max_iterations", cfg.processing.clean_max_iterations},
        {"clean_stop_threshold_db", cfg.processing.clean_stop_threshold_db},
        {"notch_half_width_bins", cfg.processing.notch_half_width_bins},
        {"snapshot_mode",
         cfg.processing.snapshot_mode == SnapshotMode::kSlowTime ? "slow_time" : "doppler_bin"},
        {"azimuth_step_deg", cfg.processing.azimuth_step_deg},
        {"elevation_step_deg", cfg.processing.elevation_step_deg},
        {"hann_window", cfg.processing.hann_window},
        {"sinc_interpolation", cfg.processing.sinc_interpolation},
        {"waveform",
         cfg.processing.waveform_mode == WaveformMode::kSingleGu ? "gu512" : "complementary_pair"}};

    j["noise"] = {{"power", cfg.noise_power}};
    j["export"] = {{"cubes", cfg.export_cfg.cubes},
                   {"range_window_bins", cfg.export_cfg.range_window_bins}};
    j["notes"] = cfg.notes;
    return j;
}

inline ExperimentConfig parse_config(const nlohmann::json& j) {
    using nlohmann::json;
    detail::require_keys(j, "", {"seed", "radar", "scene", "processing", "noise", "export",
                                 "notes"});
    ExperimentConfig cfg;
    cfg.seed = detail::get_or<std::uint64_t>(j, "seed", "", 1);

    if (!j.contains("radar")) throw ConfigError("radar", "missing section");
    const json& jr = j.at("radar");
    detail::require_keys(jr, "radar",
                         {"carrier_hz", "bandwidth_hz", "pri_s", "cpi_s", "energy_per_sample"});
    try {
        cfg.radar = RadarParams::derive(
            detail::get_or<double>(jr, "carrier_hz", "radar", 0.0),
            detail::get_or<double>(jr, "bandwidth_hz", "radar", 0.0),
            detail::get_or<double>(jr, "pri_s", "radar", 0.0),
            detail::get_or<double>(jr, "cpi_s", "radar", 0.0),
            detail::get_or<double>(jr, "energy_per_sample", "radar", 1.0));
    } catch (const InvalidArgumentError& e) {
        throw ConfigError("radar", e.what());
    }

    if (!j.contains("scene")) throw ConfigError("scene", "missing section");
    const json& js = j.at("scene");
    detail::require_keys(js, "scene", {"uca", "ground", "targets", "clutter",
                                       "random_rcs_phases"});
    cfg.random_rcs_phases = detail::get_or<bool>(js, "random_rcs_phases", "scene", false);

    if (!js.contains("uca")) throw ConfigError("scene.uca", "missing section");
    const json& ju = js.at("uca");
    detail::require_keys(ju, "scene.uca",
                         {"n_elements", "radius_m", "center", "element_pattern_h",
                          "element_pattern_v", "element_azimuths_deg", "beam_weights"});
    const auto n_elem = detail::get_or<std::size_t>(ju, "n_elements", "scene.uca", 8);
    if (n_elem < 1) throw ConfigError("scene.uca.n_elements", "must be >= 1");
    const auto radius = detail::get_or<double>(ju, "radius_m", "scene.uca", 1.07);
    if (radius < 0.0 || !std::isfinite(radius))
        throw ConfigError("scene.uca.radius_m", "must be non-negative");
    Vec3 center{0.0, 0.0, 20.0};
    if (ju.contains("center")) {
        const json& jc = ju.at("center");
        if (!jc.is_array() || jc.size() != 3)
            throw ConfigError("scene.uca.center", "expected [x, y, z]");
        center = {jc[0].get<double>(), jc[1].get<double>(), jc[2].get<double>()};
    }
    if (center.z < 0.0) throw ConfigError("scene.uca.center", "array must sit above the ground");
    cfg.uca = UcaGeometry::uniform(n_elem, radius, center);
    cfg.uca.element_pattern_h = detail::get_or<double>(ju, "element_pattern_h", "scene.uca", 1.0);
    cfg.uca.element_pattern_v = detail::get_or<double>(ju, "element_pattern_v", "scene.uca", 1.0);
    if (ju.contains("element_azimuths_deg")) {
        const json& ja = ju.at("element_azimuths_deg");
        if (!ja.is_array() || ja.size() != n_elem)
            throw ConfigError("scene.uca.element_azimuths_deg", "need one angle per element");
        for (std::size_t i = 0; i < n_elem; ++i)
            cfg.uca.element_azimuths_rad[i] = deg2rad(ja[i].get<double>());
    }
    if (ju.contains("beam_weights")) {
        const json& jw = ju.at("beam_weights");
        if (!jw.is_array() || jw.size() != n_elem)
            throw ConfigError("scene.uca.beam_weights", "need one weight per element");
        for (std::size_t i = 0; i < n_elem; ++i)
            cfg.uca.beam_weights[i] = detail::complex_from_json(jw[i], "scene.uca.beam_weights");
    }
    try {
        cfg.uca.validate();
    } catch (const InvalidArgumentError& e) {
        throw ConfigError("scene.uca", e.what());
    }

    if (js.contains("ground")) {
        const json& jg = js.at("ground");
        detail::require_keys(jg, "scene.ground",
                             {"mode", "relative_permittivity", "gamma_h", "gamma_v"});
        const auto mode = detail::get_or<std::string>(jg, "mode", "scene.ground", "fixed");
        if (mode == "fresnel")
            cfg.ground.mode = GroundModel::Mode::kFresnel;
        else if (mode == "fixed")
            cfg.ground.mode = GroundModel::Mode::kFixed;
        else
            throw ConfigError("scene.ground.mode", "expected \"fresnel\" or \"fixed\"");
        if (jg.contains("relative_permittivity"))
            cfg.ground.relative_permittivity = detail::complex_from_json(
                jg.at("relative_permittivity"), "scene.ground.relative_permittivity");
        if (jg.contains("gamma_h"))
            cfg.ground.fixed_gamma_h =
                detail::complex_from_json(jg.at("gamma_h"), "scene.ground.gamma_h");
        if (jg.contains("gamma_v"))
            cfg.ground.fixed_gamma_v =
                detail::complex_from_json(jg.at("gamma_v"), "scene.ground.gamma_v");
        try {
            cfg.ground.validate();
        } catch (const InvalidArgumentError& e) {
            throw ConfigError("scene.ground", e.what());
        }
    }

    if (js.contains("targets")) {
        const json& jt = js.at("targets");
        if (!jt.is_array()) throw ConfigError("scene.targets", "expected an array");
        for (std::size_t i = 0; i < jt.size(); ++i) {
            const std::string path = "scene.targets[" + std::to_string(i) + "]";
            detail::require_keys(jt[i], path,
                                 {"range_m", "azimuth_deg", "elevation_deg", "radial_speed_mps",
                                  "rcs"});
            Target t;
            t.range0_m = detail::get_or<double>(jt[i], "range_m", path, 0.0);
            t.azimuth_deg = detail::get_or<double>(jt[i], "azimuth_deg", path, 0.0);
            t.elevation_deg = detail::get_or<double>(jt[i], "elevation_deg", path, 90.0);
            t.radial_speed_mps = detail::get_or<double>(jt[i], "radial_speed_mps", path, 0.0);
            if (jt[i].contains("rcs")) {
                const json& jrcs = jt[i].at("rcs");
                detail::require_keys(jrcs, path + ".rcs", {"hh", "hv", "vh", "vv"});
                t.rcs.hh = detail::get_or<double>(jrcs, "hh", path + ".rcs", 0.0);
                t.rcs.hv = detail::get_or<double>(jrcs, "hv", path + ".rcs", 0.0);
                t.rcs.vh = detail::get_or<double>(jrcs, "vh", path + ".rcs", 0.0);
                t.rcs.vv = detail::get_or<double>(jrcs, "vv", path + ".rcs", 0.0);
            }
            try {
                t.validate();
                const Vec3 p =
                    cfg.uca.center + spherical_to_cartesian(t.range0_m, t.azimuth_deg,
                                                            t.elevation_deg);
                if (p.z < 0.0) throw InvalidArgumentError("target lies below the ground plane");
            } catch (const InvalidArgumentError& e) {
                throw ConfigError(path, e.what());
            }
            cfg.targets.push_back(t);
        }
    }

    if (js.contains("clutter")) {
        const json& jc = js.at("clutter");
        detail::require_keys(jc, "scene.clutter",
                             {"enabled", "patch", "density_per_m2", "coefficient_db"});
        cfg.clutter.enabled = detail::get_or<bool>(jc, "enabled", "scene.clutter", false);
        cfg.clutter.density_per_m2 =
            detail::get_or<double>(jc, "density_per_m2", "scene.clutter", 0.05);
        cfg.clutter.coefficient_db =
            detail::get_or<double>(jc, "coefficient_db", "scene.clutter", -5.0);
        if (jc.contains("patch")) {
            const json& jp = jc.at("patch");
            detail::require_keys(jp, "scene.clutter.patch", {"x_min", "x_max", "y_min", "y_max"});
            cfg.clutter.patch = {detail::get_or<double>(jp, "x_min", "scene.clutter.patch", 0.0),
                                 detail::get_or<double>(jp, "x_max", "scene.clutter.patch", 0.0),
                                 detail::get_or<double>(jp, "y_min", "scene.clutter.patch", 0.0),
                                 detail::get_or<double>(jp, "y_max", "scene.clutter.patch", 0.0)};
        }
        if (cfg.clutter.enabled) {
            if (cfg.clutter.patch.area() <= 0.0)
                throw ConfigError("scene.clutter.patch", "degenerate patch");
            if (cfg.clutter.density_per_m2 <= 0.0)
                throw ConfigError("scene.clutter.density_per_m2", "must be positive");
        }
    }

    if (j.contains("processing")) {
        const json& jp = j.at("processing");
        detail::require_keys(jp, "processing",
                             {"clean_max_iterations", "clean_stop_threshold_db",
                              "notch_half_width_bins", "snapshot_mode", "azimuth_step_deg",
                              "elevation_step_deg", "hann_window", "sinc_interpolation",
                              "waveform"});
        auto& p = cfg.processing;
        p.clean_max_iterations =
            detail::get_or<std::size_t>(jp, "clean_max_iterations", "processing", 3);
        if (p.clean_max_iterations < 1)
            throw ConfigError("processing.clean_max_iterations", "must be >= 1");
        p.clean_stop_threshold_db =
            detail::get_or<double>(jp, "clean_stop_threshold_db", "processing", -30.0);
        p.notch_half_width_bins =
            detail::get_or<std::size_t>(jp, "notch_half_width_bins", "processing", 1);
        const auto mode = detail::get_or<std::string>(jp, "snapshot_mode", "processing",
                                                      "slow_time");
        if (mode == "slow_time")
            p.snapshot_mode = SnapshotMode::kSlowTime;
        else if (mode == "doppler_bin")
            p.snapshot_mode = SnapshotMode::kDopplerBin;
        else
            throw ConfigError("processing.snapshot_mode",
                              "expected \"slow_time\" or \"doppler_bin\"");
        p.azimuth_step_deg = detail::get_or<double>(jp, "azimuth_step_deg", "processing", 1.0);
        p.elevation_step_deg = detail::get_or<double>(jp, "elevation_step_deg", "processing", 1.0);
        if (p.azimuth_step_deg <= 0.0 || p.elevation_step_deg <= 0.0)
            throw ConfigError("processing.azimuth_step_deg", "grid steps must be positive");
        p.hann_window = detail::get_or<bool>(jp, "hann_window", "processing", false);
        p.sinc_interpolation = detail::get_or<bool>(jp, "sinc_interpolation", "processing", false);
        const auto wf = detail::get_or<std::string>(jp, "waveform", "processing", "gu512");
        if (wf == "gu512")
            p.waveform_mode = WaveformMode::kSingleGu;
        else if (wf == "complementary_pair")
            p.waveform_mode = WaveformMode::kComplementaryPair;
        else
            throw ConfigError("processing.waveform",
                              "expected \"gu512\" or \"complementary_pair\"");
    }

    if (j.contains("noise")) {
        const json& jn = j.at("noise");
        detail::require_keys(jn, "noise", {"power"});
        cfg.noise_power = detail::get_or<double>(jn, "power", "noise", 0.0);
        if (cfg.noise_power < 0.0) throw ConfigError("noise.power", "must be non-negative");
    }

    if (j.contains("export")) {
        const json& je = j.at("export");
        detail::require_keys(je, "export", {"cubes", "range_window_bins"});
        cfg.export_cfg.cubes = detail::get_or<bool>(je, "cubes", "export", false);
        cfg.export_cfg.range_window_bins =
            detail::get_or<std::size_t>(je, "range_window_bins", "export", 0);
    }

    if (j.contains("notes")) {
        const json& jn = j.at("notes");
        if (!jn.is_array()) throw ConfigError("notes", "expected an array of strings");
        for (const auto& n : jn) cfg.notes.push_back(n.get<std::string>());
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("parse error in " + path.string() + ": " + e.what());
    }
    return parse_config(j);
}

/// FNV-1a over the canonical serialization; stable across platforms.
inline std::string config_hash(const ExperimentConfig& cfg) {
    const std::string dump = to_json(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char ch : dump) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace swarm5d
