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

#include "chanmap/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace chanmap
{

Polygon3 Polygon3::make(std::vector<Vec3> vertices)
{
    if (vertices.size() < 3)
        throw std::invalid_argument("polygon needs at least 3 vertices");

    // Newell's method; degenerate (collinear) input yields a zero normal.
    Vec3 n{};
    for (std::size_t i = 0; i < vertices.size(); ++i)
    {
        const Vec3 &a = vertices[i];
        const Vec3 &b = vertices[(i + 1) % vertices.size()];
        n.x += (a.y - b.y) * (a.z + b.z);
        n.y += (a.z - b.z) * (a.x + b.x);
        n.z += (a.x - b.x) * (a.y + b.y);
    }

    double scale = 0.0;
    for (const Vec3 &v : vertices)
        scale = std::max({scale, std::abs(v.x), std::abs(v.y), std::abs(v.z)});
    scale = std::max(scale, 1.0);

    if (n.norm() < 1e-12 * scale * scale)
        throw std::invalid_argument("polygon vertices are collinear or degenerate");

    Polygon3 poly;
    poly.normal_ = n.normalized();
    poly.plane_d_ = poly.normal_.dot(vertices[0]);
    for (const Vec3 &v : vertices)
        if (std::abs(poly.normal_.dot(v) - poly.plane_d_) > 1e-6 * scale)
            throw std::invalid_argument("polygon vertices are not coplanar");

    const double ax = std::abs(poly.normal_.x), ay = std::abs(poly.normal_.y), az = std::abs(poly.normal_.z);
    poly.drop_axis_ = (ax >= ay && ax >= az) ? 0 : (ay >= az ? 1 : 2);
    poly.vertices_ = std::move(vertices);
    return poly;
}

namespace
{
inline void project2d(const Vec3 &p, int drop, double &u, double &v)
{
    switch (drop)
    {
    case 0:
        u = p.y;
        v = p.z;
        return;
    case 1:
        u = p.x;
        v = p.z;
        return;
    default:
        u = p.x;
        v = p.y;
        return;
    }
}
} // namespace

bool Polygon3::contains(const Vec3 &p, double tol) const
{
    double pu, pv;
    project2d(p, drop_axis_, pu, pv);

    // crossing-number test with an edge-proximity check
    bool inside = false;
    const std::size_t n = vertices_.size();
    for (std::size_t i = 0; i < n; ++i)
    {
        double au, av, bu, bv;
        project2d(vertices_[i], drop_axis_, au, av);
        project2d(vertices_[(i + 1) % n], drop_axis_, bu, bv);

        // distance from p to edge segment (treat on-edge as inside)
        const double eu = bu - au, ev = bv - av;
        const double len2 = eu * eu + ev * ev;
        if (len2 > 0.0)
        {
            double t = ((pu - au) * eu + (pv - av) * ev) / len2;
            t = std::clamp(t, 0.0, 1.0);
            const double du = pu - (au + t * eu), dv = pv - (av + t * ev);
            if (du * du + dv * dv <= tol * tol)
                return true;
        }

        if ((av > pv) != (bv > pv))
        {
            const double x_cross = au + (pv - av) / (bv - av) * (bu - au);
            if (pu < x_cross)
                inside = !inside;
        }
    }
    return inside;
}

std::optional<Vec3> Polygon3::segment_intersection(const Vec3 &a, const Vec3 &b, double t_min, double t_max) const
{
    const double da = signed_distance(a);
    const double db = signed_distance(b);
    const double denom = da - db;
    if (std::abs(denom) < 1e-15)
        return std::nullopt; // segment parallel to plane
    const double t = da / denom;
    if (t <= t_min || t >= t_max)
        return std::nullopt;
    const Vec3 hit = a + (b - a) * t;
    if (!contains(hit))
        return std::nullopt;
    return hit;
}

} // namespace chanmap
