// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "swarm5d/channel.hpp"
#include "swarm5d/config.hpp"
#include "swarm5d/errors.hpp"
#include "swarm5d/geometry.hpp"
#include "swarm5d/golay.hpp"
#include "swarm5d/io.hpp"
#include "swarm5d/music.hpp"
#include "swarm5d/rd_processing.hpp"
#include "swarm5d/rng.hpp"

namespace swarm5d {

enum class PolSelection { kH, kV, kBoth };

struct RunOptions {
    std::filesystem::path out_dir; // empty: keep everything in memory, write nothing
    PolSelection pol = PolSelection::kBoth;
};

struct StageTiming {
    std::string name;
    double seconds = 0.0;
};

/// One target in the final 5-D list: geometry/bins/angles from the stronger
/// polarization chain, amplitudes from both.
struct MergedDetection {
    Detection primary;
    double amplitude_h = std::numeric_limits<double>::quiet_NaN();
    double amplitude_v = std::numeric_limits<double>::quiet_NaN();
    bool detected_h = false;
    bool detected_v = false;
    double azimuth_deg_h = std::numeric_limits<double>::quiet_NaN();
    double elevation_deg_h = std::numeric_limits<double>::quiet_NaN();
    double azimuth_deg_v = std::numeric_limits<double>::quiet_NaN();
    double elevation_deg_v = std::numeric_limits<double>::quiet_NaN();
};

struct RunReport {
    std::string config_hash;
    std::uint64_t seed = 0;
    ScaleProfile profile = ScaleProfile::kPaper;
    std::vector<MergedDetection> detections;
    std::vector<Detection> detections_h;
    std::vector<Detection> detections_v;
    std::vector<std::string> map_paths;
    std::vector<std::string> spectrum_paths;
    std::vector<std::string> cube_paths;
    std::vector<StageTiming> timing;
    std::vector<std::string> notes;
};

/// Realizes the scene of a config: targets (with optional seeded scattering
/// phases) plus the clutter field drawn from the config's clutter substream.
inline Scene build_scene(const ExperimentConfig& cfg) {
    Scene scene;
    scene.uca = cfg.uca;
    scene.ground = cfg.ground;
    scene.targets = cfg.targets;
    if (cfg.random_rcs_phases) {
        SplitMix64 rng(substream(cfg.seed, "rcs_phases"));
        for (auto& t : scene.targets) {
            t.rcs.phase_hh = rng.uniform(0.0, 2.0 * std::numbers::pi);
            t.rcs.phase_hv = rng.uniform(0.0, 2.0 * std::numbers::pi);
            t.rcs.phase_vh = rng.uniform(0.0, 2.0 * std::numbers::pi);
            t.rcs.phase_vv = rng.uniform(0.0, 2.0 * std::numbers::pi);
        }
    }
    if (cfg.clutter.enabled)
        scene.clutter = generate_clutter(cfg.clutter.patch, cfg.clutter.density_per_m2,
                                         cfg.clutter.coefficient_db,
                                         substream(cfg.seed, "clutter"), cfg.uca.center,
                                         cfg.radar.range_resolution_m);
    return scene;
}

inline WaveformSet build_waveforms(const ExperimentConfig& cfg) {
    return make_waveform_set(cfg.processing.waveform_mode == WaveformMode::kComplementaryPair,
                             cfg.radar.amplitude());
}

namespace detail {

class StageClock {
public:
    explicit StageClock(std::vector<StageTiming>& sink) : sink_(sink) {}
    template <typename F>
    auto time(const std::string& name, F&& fn) -> decltype(fn()) {
        const auto start = std::chrono::steady_clock::now();
        if constexpr (std::is_void_v<decltype(fn())>) {
            fn();
            sink_.push_back({name, elapsed(start)});
        } else {
            auto result = fn();
            sink_.push_back({name, elapsed(start)});
            return result;
        }
    }

private:
    static double elapsed(std::chrono::steady_clock::time_point start) {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    std::vector<StageTiming>& sink_;
};

struct PolChainOutput {
    std::vector<Detection> detections;
    RangeDopplerMap notched_map; // pre-CLEAN, post-notch, antenna 0
    std::vector<MusicGrid> spectra;
    bool clean_diverged = false;
    std::string clean_note;
};

inline PolChainOutput process_polarization(DataCube&& raw, const ExperimentConfig& cfg,
                                           const WaveformSet& wfs, StageClock& clock,
                                           const RunOptions& opts,
                                           std::vector<std::string>& map_paths) {
    const Polarization pol_id = raw.pol;
    const std::string pol = polarization_name(pol_id);
    const RadarParams& params = cfg.radar;
    const std::size_t window_bins =
        cfg.export_cfg.range_window_bins
            ? cfg.export_cfg.range_window_bins
            : std::min<std::size_t>(params.fast_time_samples, kCefLength);

    DataCube compressed = std::move(raw);
    clock.time("matched_filter_" + pol,
               [&] { matched_filter_fast_time_inplace(compressed, wfs); });

    RangeDopplerMap map = clock.time("doppler_fft_" + pol, [&] {
        return doppler_fft(compressed, 0, params, cfg.processing.hann_window);
    });

    const bool write = !opts.out_dir.empty();
    auto stage_path = [&](std::size_t stage) {
        return opts.out_dir / ("rd_map_" + pol + "_0_stage" + std::to_string(stage) + ".csv");
    };
    if (write) {
        write_rd_map_csv(map, stage_path(0), window_bins);
        map_paths.push_back(stage_path(0).string());
    }

    double pre_notch_peak = 0.0;
    for (const auto& v : map.values) pre_notch_peak = std::max(pre_notch_peak, std::abs(v));

    notch_zero_doppler(map, cfg.processing.notch_half_width_bins);

    CleanOptions clean_opts;
    clean_opts.max_iterations = cfg.processing.clean_max_iterations;
    clean_opts.stop_threshold_db = cfg.processing.clean_stop_threshold_db;
    clean_opts.min_peak = pre_notch_peak * 1e-9; // numeric residue of notched static returns
    clean_opts.search_range_bins = window_bins;

    const std::optional<std::size_t> notch{cfg.processing.notch_half_width_bins};
    PointSpreadFn psf = [&](std::size_t range_bin, double doppler_hz) {
        return synthesize_point_response(range_bin, doppler_hz, wfs, params, notch,
                                         cfg.processing.hann_window);
    };
    CleanObserver observer;
    if (write)
        observer = [&](std::size_t iteration, const RangeDopplerMap& residual) {
            write_rd_map_csv(residual, stage_path(iteration), window_bins);
            map_paths.push_back(stage_path(iteration).string());
        };

    PolChainOutput out;
    CleanResult cleaned =
        clock.time("clean_" + pol, [&] { return clean(map, params, clean_opts, psf, observer); });
    out.detections = std::move(cleaned.detections);
    out.clean_diverged = cleaned.diverged;
    out.clean_note = cleaned.note;

    clock.time("music_" + pol, [&] {
        MusicGridSpec grid_spec;
        grid_spec.azimuth_step_deg = cfg.processing.azimuth_step_deg;
        grid_spec.elevation_step_deg = cfg.processing.elevation_step_deg;
        for (auto& det : out.detections) {
            const SnapshotMatrix snaps =
                gather_snapshots(compressed, det, cfg.processing.snapshot_mode, params);
            const Eigen::MatrixXcd cov = covariance(snaps);
            const Eigen::MatrixXcd basis = noise_subspace(cov, 1);
            MusicGrid grid = music_spectrum(basis, cfg.uca, params.wavenumber_rad_m, grid_spec);
            det.azimuth_deg = grid.peak_azimuth_deg;
            det.elevation_deg = grid.peak_elevation_deg;
            if (pol_id == Polarization::kH)
                det.amplitude_h = std::abs(det.amplitude);
            else
                det.amplitude_v = std::abs(det.amplitude);
            out.spectra.push_back(std::move(grid));
        }
    });

    out.notched_map = std::move(map);
    return out;
}

inline double map_magnitude_at(const RangeDopplerMap& map, std::size_t range_bin,
                               std::size_t doppler_bin) {
    if (range_bin >= map.range_bins || doppler_bin >= map.doppler_bins)
        return std::numeric_limits<double>::quiet_NaN();
    return std::abs(map.at(range_bin, doppler_bin));
}

} // namespace detail

inline nlohmann::json detections_to_json(const RunReport& report);
inline void write_detections_json(const RunReport& report, const std::filesystem::path& path);
inline void write_report_json(const ExperimentConfig& cfg, const RunReport& report,
                              const std::filesystem::path& path);

/// Runs the full 5-D pipeline on both polarization chains: synthesis, range
/// compression, Doppler processing, zero-Doppler notch, CLEAN, per-detection
/// MUSIC, polarization merge, artifact persistence. Identical config + seed
/// reproduce byte-identical detections.json.
inline RunReport run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {}) {
    RunReport report;
    report.config_hash = config_hash(cfg);
    report.seed = cfg.seed;
    report.profile = cfg.profile;
    report.notes = cfg.notes;
    detail::StageClock clock(report.timing);

    const bool write = !opts.out_dir.empty();
    if (write) std::filesystem::create_directories(opts.out_dir);

    const Scene scene = build_scene(cfg);
    const WaveformSet wfs = build_waveforms(cfg);
    const NoiseModel noise{cfg.noise_power, substream(cfg.seed, "noise")};

    SynthesisOptions synth_opts;
    synth_opts.sinc_interpolation = cfg.processing.sinc_interpolation;
    SynthesisResult synth = clock.time("synthesize", [&] {
        return synthesize_datacube(scene, cfg.radar, wfs, noise, synth_opts);
    });
    for (const auto& n : synth.notes) report.notes.push_back(n);

    if (write && cfg.export_cfg.cubes) {
        clock.time("export_cubes", [&] {
            for (const DataCube* cube : {&synth.h, &synth.v}) {
                const auto path =
                    opts.out_dir / ("cube_" + std::string(polarization_name(cube->pol)) + ".bin");
                write_cube_binary(*cube, path, report.config_hash);
                report.cube_paths.push_back(path.string());
            }
        });
    }

    const bool want_h = opts.pol != PolSelection::kV;
    const bool want_v = opts.pol != PolSelection::kH;

    std::optional<detail::PolChainOutput> chain_h;
    std::optional<detail::PolChainOutput> chain_v;
    if (want_h)
        chain_h = detail::process_polarization(std::move(synth.h), cfg, wfs, clock, opts,
                                               report.map_paths);
    synth.h = DataCube{};
    if (want_v)
        chain_v = detail::process_polarization(std::move(synth.v), cfg, wfs, clock, opts,
                                               report.map_paths);
    synth.v = DataCube{};

    for (const auto* chain : {chain_h ? &*chain_h : nullptr, chain_v ? &*chain_v : nullptr}) {
        if (chain && chain->clean_diverged)
            report.notes.push_back("CLEAN halted: " + chain->clean_note);
    }

    if (chain_h) report.detections_h = chain_h->detections;
    if (chain_v) report.detections_v = chain_v->detections;

    // Merge the two chains: pair detections that share a range/Doppler cell
    // (within one bin), keep the stronger side as the primary.
    auto same_cell = [](const Detection& a, const Detection& b) {
        const auto dr = a.range_bin > b.range_bin ? a.range_bin - b.range_bin
                                                  : b.range_bin - a.range_bin;
        const auto dd = a.doppler_bin > b.doppler_bin ? a.doppler_bin - b.doppler_bin
                                                      : b.doppler_bin - a.doppler_bin;
        return dr <= 1 && dd <= 1;
    };
    std::vector<bool> used_h(report.detections_h.size(), false);
    for (const auto& dv : report.detections_v) {
        MergedDetection rec;
        rec.detected_v = true;
        rec.amplitude_v = std::abs(dv.amplitude);
        rec.azimuth_deg_v = dv.azimuth_deg;
        rec.elevation_deg_v = dv.elevation_deg;
        const Detection* dh = nullptr;
        for (std::size_t i = 0; i < report.detections_h.size(); ++i) {
            if (!used_h[i] && same_cell(dv, report.detections_h[i])) {
                used_h[i] = true;
                dh = &report.detections_h[i];
                break;
            }
        }
        if (dh) {
            rec.detected_h = true;
            rec.amplitude_h = std::abs(dh->amplitude);
            rec.azimuth_deg_h = dh->azimuth_deg;
            rec.elevation_deg_h = dh->elevation_deg;
            rec.primary = rec.amplitude_v >= rec.amplitude_h ? dv : *dh;
        } else {
            rec.primary = dv;
            if (chain_h)
                rec.amplitude_h = detail::map_magnitude_at(chain_h->notched_map, dv.range_bin,
                                                           dv.doppler_bin);
        }
        report.detections.push_back(rec);
    }
    for (std::size_t i = 0; i < report.detections_h.size(); ++i) {
        if (used_h[i]) continue;
        const Detection& dh = report.detections_h[i];
        MergedDetection rec;
        rec.primary = dh;
        rec.detected_h = true;
        rec.amplitude_h = std::abs(dh.amplitude);
        rec.azimuth_deg_h = dh.azimuth_deg;
        rec.elevation_deg_h = dh.elevation_deg;
        if (chain_v)
            rec.amplitude_v = detail::map_magnitude_at(chain_v->notched_map, dh.range_bin,
                                                       dh.doppler_bin);
        report.detections.push_back(rec);
    }
    std::stable_sort(report.detections.begin(), report.detections.end(),
                     [](const MergedDetection& a, const MergedDetection& b) {
                         const double ma = std::fmax(a.detected_h ? a.amplitude_h : 0.0,
                                                     a.detected_v ? a.amplitude_v : 0.0);
                         const double mb = std::fmax(b.detected_h ? b.amplitude_h : 0.0,
                                                     b.detected_v ? b.amplitude_v : 0.0);
                         return ma > mb;
                     });

    if (write) {
        clock.time("artifacts", [&] {
            // MUSIC spectra per polarization and detection (1-based index).
            auto write_spectra = [&](const detail::PolChainOutput& chain, const char* pol) {
                for (std::size_t k = 0; k < chain.spectra.size(); ++k) {
                    const auto path = opts.out_dir / ("music_" + std::string(pol) + "_" +
                                                      std::to_string(k + 1) + ".csv");
                    write_music_csv(chain.spectra[k], path);
                    report.spectrum_paths.push_back(path.string());
                }
            };
            if (chain_h) write_spectra(*chain_h, "H");
            if (chain_v) write_spectra(*chain_v, "V");
            write_detections_json(report, opts.out_dir / "detections.json");
            write_report_json(cfg, report, opts.out_dir / "report.json");
        });
    }
    return report;
}

inline nlohmann::json detections_to_json(const RunReport& report) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& d : report.detections) {
        nlohmann::json j;
        j["range_bin"] = d.primary.range_bin;
        j["doppler_bin"] = d.primary.doppler_bin;
        j["range_m"] = d.primary.range_m;
        j["doppler_hz"] = d.primary.doppler_hz;
        j["velocity_mps"] = d.primary.velocity_mps;
        j["azimuth_deg"] = d.primary.azimuth_deg;
        j["elevation_deg"] = d.primary.elevation_deg;
        j["amplitude_h"] = d.amplitude_h;
        j["amplitude_v"] = d.amplitude_v;
        j["detected_h"] = d.detected_h;
        j["detected_v"] = d.detected_v;
        j["azimuth_deg_h"] = d.azimuth_deg_h;
        j["elevation_deg_h"] = d.elevation_deg_h;
        j["azimuth_deg_v"] = d.azimuth_deg_v;
        j["elevation_deg_v"] = d.elevation_deg_v;
        arr.push_back(j);
    }
    return arr;
}

inline void write_detections_json(const RunReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ProcessingError("cannot write " + path.string());
    out << detections_to_json(report).dump(2) << '\n';
}

inline void write_report_json(const ExperimentConfig& cfg, const RunReport& report,
                              const std::filesystem::path& path) {
    nlohmann::json j;
    j["config"] = to_json(cfg);
    j["config_hash"] = report.config_hash;
    j["seed"] = report.seed;
    j["profile"] = report.profile == ScaleProfile::kPaper ? "paper" : "desk";
    j["notes"] = report.notes;
    j["detections"] = detections_to_json(report);
    nlohmann::json timing = nlohmann::json::array();
    for (const auto& t : report.timing) timing.push_back({{"stage", t.name}, {"seconds", t.seconds}});
    j["timing"] = timing;
    j["artifacts"] = {{"maps", report.map_paths},
                      {"spectra", report.spectrum_paths},
                      {"cubes", report.cube_paths}};
    std::ofstream out(path);
    if (!out) throw ProcessingError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

} // namespace swarm5d
