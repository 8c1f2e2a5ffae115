// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "swarm5d/channel.hpp"
#include "swarm5d/errors.hpp"
#include "swarm5d/golay.hpp"
#include "swarm5d/music.hpp"
#include "swarm5d/rd_processing.hpp"

namespace swarm5d {

inline double magnitude_db(cd v) {
    const double mag = std::abs(v);
    return mag > 1e-300 ? 20.0 * std::log10(mag) : -6000.0;
}

/// Range-Doppler magnitudes in dB as CSV. First column is range in meters,
/// the header row carries the Doppler axis in Hz. Rows limited to
/// `range_rows` bins (0 = all).
inline void write_rd_map_csv(const RangeDopplerMap& map, const std::filesystem::path& path,
                             std::size_t range_rows = 0) {
    std::ofstream out(path);
    if (!out) throw ProcessingError("cannot write " + path.string());
    const std::size_t rows = range_rows ? std::min(range_rows, map.range_bins) : map.range_bins;
    out << "range_m";
    for (std::size_t d = 0; d < map.doppler_bins; ++d) out << ',' << map.doppler_at(d);
    out << '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        out << map.range_at(r);
        for (std::size_t d = 0; d < map.doppler_bins; ++d)
            out << ',' << magnitude_db(map.at(r, d));
        out << '\n';
    }
}

/// MUSIC spectrum in dB as CSV with axis headers: first column elevation in
/// degrees, header row the azimuth axis.
inline void write_music_csv(const MusicGrid& grid, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ProcessingError("cannot write " + path.string());
    out << "elevation_deg";
    for (double a : grid.azimuth_deg) out << ',' << a;
    out << '\n';
    for (std::size_t e = 0; e < grid.elevation_deg.size(); ++e) {
        out << grid.elevation_deg[e];
        for (std::size_t a = 0; a < grid.azimuth_deg.size(); ++a)
            out << ',' << 10.0 * std::log10(std::max(grid.at(e, a), 1e-300));
        out << '\n';
    }
}

/// One +-1 value per line.
inline void write_sequence_csv(const std::vector<int>& seq, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ProcessingError("cannot write " + path.string());
    for (int v : seq) out << v << '\n';
}

/// Raw little-endian complex64 cube (interleaved float32 re/im, antenna-major,
/// then packet, then fast time) plus a JSON sidecar describing it.
inline void write_cube_binary(const DataCube& cube, const std::filesystem::path& path,
                              const std::string& params_hash) {
    {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ProcessingError("cannot write " + path.string());
        std::vector<float> buf(2 * cube.fast_len);
        for (std::size_t ant = 0; ant < cube.n_antennas; ++ant) {
            for (std::size_t q = 0; q < cube.slow_len; ++q) {
                const cd* row = cube.row(ant, q);
                for (std::size_t p = 0; p < cube.fast_len; ++p) {
                    buf[2 * p] = static_cast<float>(row[p].real());
                    buf[2 * p + 1] = static_cast<float>(row[p].imag());
                }
                out.write(reinterpret_cast<const char*>(buf.data()),
                          static_cast<std::streamsize>(buf.size() * sizeof(float)));
            }
        }
    }
    nlohmann::json side;
    side["dtype"] = "complex64_le";
    side["dims"] = {cube.n_antennas, cube.slow_len, cube.fast_len};
    side["order"] = "antenna,packet,sample";
    side["polarization"] = polarization_name(cube.pol);
    side["params_hash"] = params_hash;
    std::ofstream meta(path.string() + ".json");
    if (!meta) throw ProcessingError("cannot write sidecar for " + path.string());
    meta << side.dump(2) << '\n';
}

} // namespace swarm5d
