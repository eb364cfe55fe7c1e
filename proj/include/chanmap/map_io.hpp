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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chanmap/cir.hpp"
#include "chanmap/scene.hpp"

namespace chanmap
{

// Binary channel-map container: magic "CMAP", version, endianness marker,
// grid geometry, N, L, t, carrier, bandwidth, then row-major complex128
// matrices in node order.
struct MapHeader
{
    std::uint64_t rows = 0, cols = 0;
    double spacing_m = 0.0;
    double origin_x = 0.0, origin_y = 0.0;
    double rx_height = 1.5;
    std::uint64_t n_antennas = 0, n_subcarriers = 0;
    double t = 0.0;
    double carrier_hz = 0.0, bandwidth_hz = 0.0;

    std::size_t n_nodes() const { return rows * cols; }
    LocationGrid grid() const;
};

void write_map(const std::string &path, const MapHeader &header, const std::vector<ChannelMatrix> &matrices);

struct MapFile
{
    MapHeader header;
    std::vector<ChannelMatrix> matrices;
};
MapFile read_map(const std::string &path);

// Debug export: node_index, x, y, antenna, subcarrier, re, im.
void write_map_csv(const std::string &path, const MapHeader &header, const std::vector<ChannelMatrix> &matrices);

// Observed-mask file: "node_index,observed" rows.
void write_mask_csv(const std::string &path, const std::vector<std::uint8_t> &mask);
std::vector<std::uint8_t> read_mask_csv(const std::string &path, std::size_t expected_nodes);

} // namespace chanmap
