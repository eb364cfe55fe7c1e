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

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "chanmap/geometry.hpp"

namespace chanmap
{

// Static reflecting surface. Geometry is 2.5-D: polygons are typically
// vertical walls, optionally horizontal floor/ceiling planes.
struct Surface
{
    std::string name;
    Polygon3 polygon;
    double reflection_loss_db = 0.0; // per-bounce power loss, >= 0
};

// Point scatterer moving along piecewise-linear waypoints.
struct DynamicObject
{
    std::string name;
    std::vector<std::pair<double, Vec3>> waypoints; // (t, position), strictly increasing t
    double scatter_gain_db = 0.0;
    double t_start = 0.0, t_end = 0.0; // active interval, within waypoint span
};

// Position at time t by piecewise-linear interpolation; exact at waypoints.
// Throws std::out_of_range outside the waypoint span.
Vec3 object_position(const DynamicObject &obj, double t);

// Maximum speed over all waypoint segments (m/s).
double object_max_speed(const DynamicObject &obj);

// Uniform receiver grid, row-major: index = row * cols + col.
struct LocationGrid
{
    std::size_t rows = 0, cols = 0;
    double spacing_m = 0.0;
    Vec3 origin{};
    double rx_height = 1.5;
    std::vector<std::pair<double, double>> coordinates; // (x, y) per node

    std::size_t n_nodes() const { return coordinates.size(); }
    Vec3 node_position(std::size_t idx) const
    {
        return {coordinates[idx].first, coordinates[idx].second, rx_height};
    }
};

LocationGrid build_grid(std::size_t rows, std::size_t cols, double spacing_m, const Vec3 &origin,
                        double rx_height = 1.5);

struct Scene
{
    std::vector<Surface> surfaces;
    Vec3 tx_position{};
    double tx_height = 0.0; // == tx_position.z
    double carrier_hz = 0.0;
    double bandwidth_hz = 0.0;
    std::vector<DynamicObject> dynamic_objects;
    std::optional<LocationGrid> grid; // optional [grid] section

    double wavelength() const { return kSpeedOfLight / carrier_hz; }
};

// Parse and validate a scene description (sections [tx], [grid], [surface.*],
// [dynamic.*]; meters / seconds / Hz / dB). Throws std::invalid_argument.
Scene load_scene(const std::string &config_text);
Scene load_scene_file(const std::string &path);

// Serialize back to the config text form; load_scene(save_scene(s)) == s.
std::string save_scene(const Scene &scene);

bool scene_equal(const Scene &a, const Scene &b, double tol = 0.0);

} // namespace chanmap
