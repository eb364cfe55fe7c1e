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

#include <cmath>
#include <optional>
#include <vector>

namespace chanmap
{

inline constexpr double kSpeedOfLight = 299792458.0; // m/s

struct Vec3
{
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 &operator+=(const Vec3 &o)
    {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }

    double dot(const Vec3 &o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3 &o) const { return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x}; }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const
    {
        const double n = norm();
        return n > 0.0 ? Vec3{x / n, y / n, z / n} : Vec3{};
    }
};

inline double distance(const Vec3 &a, const Vec3 &b) { return (a - b).norm(); }

// azimuth of the direction from -> to, in radians
inline double azimuth(const Vec3 &from, const Vec3 &to) { return std::atan2(to.y - from.y, to.x - from.x); }

// Planar polygon in 3-D with a precomputed plane equation. Vertices must be
// non-collinear and coplanar (validated by make()).
class Polygon3
{
public:
    static Polygon3 make(std::vector<Vec3> vertices); // throws std::invalid_argument

    const std::vector<Vec3> &vertices() const { return vertices_; }
    const Vec3 &normal() const { return normal_; }

    double signed_distance(const Vec3 &p) const { return normal_.dot(p) - plane_d_; }

    // mirror image of p across the polygon plane
    Vec3 mirror(const Vec3 &p) const { return p - normal_ * (2.0 * signed_distance(p)); }

    // true if p (assumed on the plane) lies inside the polygon
    bool contains(const Vec3 &p, double tol = 1e-9) const;

    // Intersection of segment a->b with the polygon, restricted to the open
    // parametric interval (t_min, t_max). Returns the hit point, or nothing.
    std::optional<Vec3> segment_intersection(const Vec3 &a, const Vec3 &b, double t_min = 1e-9,
                                             double t_max = 1.0 - 1e-9) const;

private:
    std::vector<Vec3> vertices_;
    Vec3 normal_;    // unit
    double plane_d_; // plane: dot(normal, p) == plane_d
    int drop_axis_;  // axis dropped for 2-D point-in-polygon projection
};

} // namespace chanmap
