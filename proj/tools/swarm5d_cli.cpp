// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: run a sensing experiment from a JSON config (or a
// bundled preset) and export Golay sequences.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "swarm5d/config.hpp"
#include "swarm5d/experiment.hpp"
#include "swarm5d/io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitProcessingError = 3;

swarm5d::ExperimentConfig resolve_config(const std::string& spec) {
    if (std::filesystem::exists(spec)) return swarm5d::load_config(spec);
    if (const auto* preset = swarm5d::preset_by_name(spec)) return *preset;
    throw swarm5d::ConfigError("config", "no such file or preset: " + spec);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"5-D ground-target sensing simulator (UAV-swarm circular array, "
                 "802.11ad Golay waveform)"};
    app.require_subcommand(1);

    // simulate
    std::string config_spec;
    std::string out_dir;
    std::string profile = "paper";
    std::string pol = "both";
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool export_cubes = false;
    auto* simulate = app.add_subcommand("simulate", "run the full sensing pipeline");
    simulate->add_option("--config", config_spec, "config file path or preset name")->required();
    simulate->add_option("--out", out_dir, "output directory for artifacts")->required();
    simulate->add_option("--seed", seed, "override the config seed")
        ->each([&](const std::string&) { seed_set = true; });
    simulate->add_option("--profile", profile, "scale profile: paper or desk")
        ->check(CLI::IsMember({"paper", "desk"}));
    simulate->add_option("--pol", pol, "polarization chains to run: H, V or both")
        ->check(CLI::IsMember({"H", "V", "both"}));
    simulate->add_flag("--export-cubes", export_cubes, "write raw received cubes");

    // golay
    std::size_t golay_length = 512;
    std::string golay_out = ".";
    bool golay_cef = false;
    auto* golay = app.add_subcommand("golay", "export Golay sequences as CSV");
    golay->add_option("--length", golay_length, "sequence length (power of two, 2..512)");
    golay->add_option("--out", golay_out, "output directory");
    golay->add_flag("--cef", golay_cef,
                    "also export the 512-sample channel-estimation sequences");

    // preset
    std::string preset_name = "paper_fig4";
    std::string preset_out;
    auto* preset = app.add_subcommand("preset", "write a bundled preset config to a file");
    preset->add_option("--name", preset_name, "preset name");
    preset->add_option("--out", preset_out, "output file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            swarm5d::ExperimentConfig cfg = resolve_config(config_spec);
            if (seed_set) cfg.seed = seed;
            swarm5d::apply_profile(cfg, profile == "desk" ? swarm5d::ScaleProfile::kDesk
                                                          : swarm5d::ScaleProfile::kPaper);
            if (export_cubes) cfg.export_cfg.cubes = true;

            swarm5d::RunOptions opts;
            opts.out_dir = out_dir;
            opts.pol = pol == "H"   ? swarm5d::PolSelection::kH
                       : pol == "V" ? swarm5d::PolSelection::kV
                                    : swarm5d::PolSelection::kBoth;

            const swarm5d::RunReport report = swarm5d::run_experiment(cfg, opts);
            std::cout << "config " << report.config_hash << ", " << report.detections.size()
                      << " detection(s)\n";
            for (const auto& d : report.detections) {
                std::cout << "  range " << d.primary.range_m << " m, velocity "
                          << d.primary.velocity_mps << " m/s, azimuth " << d.primary.azimuth_deg
                          << " deg, elevation " << d.primary.elevation_deg << " deg\n";
            }
            for (const auto& note : report.notes) std::cout << "note: " << note << '\n';
        } else if (golay->parsed()) {
            const auto pair = swarm5d::generate_golay_pair(golay_length);
            std::filesystem::create_directories(golay_out);
            const auto base = std::filesystem::path(golay_out);
            swarm5d::write_sequence_csv(pair.a,
                                        base / ("golay_a_" + std::to_string(golay_length) + ".csv"));
            swarm5d::write_sequence_csv(pair.b,
                                        base / ("golay_b_" + std::to_string(golay_length) + ".csv"));
            if (golay_cef) {
                const auto pair256 = swarm5d::generate_golay_pair(256);
                const auto [gu, gv] = swarm5d::build_cef_pair(pair256);
                auto to_int = [](const swarm5d::PulseWaveform& w) {
                    std::vector<int> v;
                    v.reserve(w.samples.size());
                    for (const auto& s : w.samples) v.push_back(s.real() > 0 ? 1 : -1);
                    return v;
                };
                swarm5d::write_sequence_csv(to_int(gu), base / "gu512.csv");
                swarm5d::write_sequence_csv(to_int(gv), base / "gv512.csv");
            }
        } else if (preset->parsed()) {
            const auto* cfg = swarm5d::preset_by_name(preset_name);
            if (!cfg) throw swarm5d::ConfigError("preset", "no such preset: " + preset_name);
            std::ofstream out(preset_out);
            if (!out) throw swarm5d::ConfigError("preset", "cannot write " + preset_out);
            out << swarm5d::to_json(*cfg).dump(2) << '\n';
        }
    } catch (const swarm5d::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "processing error: " << e.what() << '\n';
        return kExitProcessingError;
    }
    return kExitOk;
}
