// SPDX-License-Identifier: Apache-2.0
//
// chanmap - hybrid channel model and graph-learning library for
// space-time continuous channel maps
// Copyright (C) 2026 chanmap project contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "chanmap/map_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace chanmap
{

namespace
{
constexpr std::uint32_t kEndianMarker = 0x01020304u;

template <typename T> void put(std::ofstream &f, const T &v)
{
    f.write(reinterpret_cast<const char *>(&v), sizeof(T));
}
template <typename T> T take(std::ifstream &f)
{
    T v{};
    f.read(reinterpret_cast<char *>(&v), sizeof(T));
    return v;
}
} // namespace

LocationGrid MapHeader::grid() const
{
    return build_grid(rows, cols, spacing_m, {origin_x, origin_y, 0.0}, rx_height);
}

void write_map(const std::string &path, const MapHeader &header, const std::vector<ChannelMatrix> &matrices)
{
    if (matrices.size() != header.n_nodes())
        throw std::invalid_argument("write_map: matrix count does not match grid dims");

    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("write_map: cannot open '" + path + "'");
    f.write("CMAP", 4);
    put<std::uint32_t>(f, 1);
    put<std::uint32_t>(f, kEndianMarker);
    put<std::uint64_t>(f, header.rows);
    put<std::uint64_t>(f, header.cols);
    put<double>(f, header.spacing_m);
    put<double>(f, header.origin_x);
    put<double>(f, header.origin_y);
    put<double>(f, header.rx_height);
    put<std::uint64_t>(f, header.n_antennas);
    put<std::uint64_t>(f, header.n_subcarriers);
    put<double>(f, header.t);
    put<double>(f, header.carrier_hz);
    put<double>(f, header.bandwidth_hz);

    for (const ChannelMatrix &h : matrices)
    {
        if (h.n_antennas() != header.n_antennas || h.n_subcarriers() != header.n_subcarriers)
            throw std::invalid_argument("write_map: matrix dims do not match header");
        for (std::size_t a = 0; a < header.n_antennas; ++a)
            for (std::size_t s = 0; s < header.n_subcarriers; ++s)
            {
                const std::complex<double> v = h.entries(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(s));
                put<double>(f, v.real());
                put<double>(f, v.imag());
            }
    }
}

MapFile read_map(const std::string &path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("read_map: cannot open '" + path + "'");
    char magic[4];
    f.read(magic, 4);
    if (std::string(magic, 4) != "CMAP")
        throw std::runtime_error("read_map: bad magic in '" + path + "'");
    if (take<std::uint32_t>(f) != 1)
        throw std::runtime_error("read_map: unsupported version");
    if (take<std::uint32_t>(f) != kEndianMarker)
        throw std::runtime_error("read_map: endianness mismatch");

    MapFile out;
    out.header.rows = take<std::uint64_t>(f);
    out.header.cols = take<std::uint64_t>(f);
    out.header.spacing_m = take<double>(f);
    out.header.origin_x = take<double>(f);
    out.header.origin_y = take<double>(f);
    out.header.rx_height = take<double>(f);
    out.header.n_antennas = take<std::uint64_t>(f);
    out.header.n_subcarriers = take<std::uint64_t>(f);
    out.header.t = take<double>(f);
    out.header.carrier_hz = take<double>(f);
    out.header.bandwidth_hz = take<double>(f);

    out.matrices.resize(out.header.n_nodes());
    for (std::size_t i = 0; i < out.matrices.size(); ++i)
    {
        ChannelMatrix &h = out.matrices[i];
        h.node_index = i;
        h.t = out.header.t;
        h.entries.resize(static_cast<Eigen::Index>(out.header.n_antennas),
                         static_cast<Eigen::Index>(out.header.n_subcarriers));
        for (std::size_t a = 0; a < out.header.n_antennas; ++a)
            for (std::size_t s = 0; s < out.header.n_subcarriers; ++s)
            {
                const double re = take<double>(f);
                const double im = take<double>(f);
                h.entries(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(s)) = {re, im};
            }
    }
    if (!f)
        throw std::runtime_error("read_map: truncated file '" + path + "'");
    return out;
}

void write_map_csv(const std::string &path, const MapHeader &header, const std::vector<ChannelMatrix> &matrices)
{
    std::ofstream f(path);
    if (!f)
        throw std::runtime_error("write_map_csv: cannot open '" + path + "'");
    f << "node_index,x,y,antenna,subcarrier,re,im\n";
    const LocationGrid grid = header.grid();
    char buf[256];
    for (std::size_t i = 0; i < matrices.size(); ++i)
    {
        const auto &[x, y] = grid.coordinates[i];
        for (std::size_t a = 0; a < header.n_antennas; ++a)
            for (std::size_t s = 0; s < header.n_subcarriers; ++s)
            {
                const std::complex<double> v =
                    matrices[i].entries(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(s));
                std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%zu,%zu,%.17g,%.17g\n", i, x, y, a, s, v.real(),
                              v.imag());
                f << buf;
            }
    }
}

void write_mask_csv(const std::string &path, const std::vector<std::uint8_t> &mask)
{
    std::ofstream f(path);
    if (!f)
        throw std::runtime_error("write_mask_csv: cannot open '" + path + "'");
    f << "node_index,observed\n";
    for (std::size_t i = 0; i < mask.size(); ++i)
        f << i << "," << (mask[i] != 0 ? 1 : 0) << "\n";
}

std::vector<std::uint8_t> read_mask_csv(const std::string &path, std::size_t expected_nodes)
{
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("read_mask_csv: cannot open '" + path + "'");
    std::vector<std::uint8_t> mask(expected_nodes, 0);
    std::string line;
    std::getline(f, line); // header
    while (std::getline(f, line))
    {
        if (line.empty())
            continue;
        std::size_t idx = 0;
        int observed = 0;
        if (std::sscanf(line.c_str(), "%zu,%d", &idx, &observed) != 2 || idx >= expected_nodes)
            throw std::runtime_error("read_mask_csv: malformed row '" + line + "'");
        mask[idx] = observed != 0 ? 1 : 0;
    }
    return mask;
}

} // namespace chanmap
