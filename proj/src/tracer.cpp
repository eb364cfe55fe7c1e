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

#include "chanmap/tracer.hpp"

#include <cmath>
#include <numbers>

namespace chanmap
{

namespace
{

constexpr double kEndpointTol = 1e-6; // meters; hits this close to a declared bounce endpoint are that bounce

inline double free_space_power(double wavelength, double dist)
{
    const double x = wavelength / (4.0 * std::numbers::pi * dist);
    return x * x;
}

inline double loss_linear(double loss_db) { return std::pow(10.0, -loss_db / 10.0); }

} // namespace

bool segment_clear(const Scene &scene, const Vec3 &a, const Vec3 &b, int ignore_a, int ignore_b)
{
    for (std::size_t i = 0; i < scene.surfaces.size(); ++i)
    {
        const auto hit = scene.surfaces[i].polygon.segment_intersection(a, b);
        if (!hit)
            continue;
        const int idx = static_cast<int>(i);
        if (idx == ignore_a && distance(*hit, a) < kEndpointTol)
            continue;
        if (idx == ignore_b && distance(*hit, b) < kEndpointTol)
            continue;
        return false;
    }
    return true;
}

bool tx_visible(const Scene &scene, const Vec3 &p) { return segment_clear(scene, scene.tx_position, p); }

std::vector<RayPath> trace_specular(const Scene &scene, const Vec3 &rx, int max_order)
{
    std::vector<RayPath> rays;
    const Vec3 tx = scene.tx_position;
    const double lambda = scene.wavelength();

    // LoS
    if (segment_clear(scene, tx, rx))
    {
        RayPath ray;
        const double d = distance(tx, rx);
        ray.kind = RayKind::LoS;
        ray.power = free_space_power(lambda, d);
        ray.delay_s = d / kSpeedOfLight;
        ray.aoa_rad = azimuth(rx, tx);
        rays.push_back(ray);
    }

    if (max_order < 1)
        return rays;

    const int n_surf = static_cast<int>(scene.surfaces.size());

    // first-order reflections
    for (int i = 0; i < n_surf; ++i)
    {
        const Polygon3 &poly = scene.surfaces[i].polygon;
        const Vec3 image = poly.mirror(tx);
        const auto bounce = poly.segment_intersection(image, rx);
        if (!bounce)
            continue;
        if (!segment_clear(scene, tx, *bounce, -1, i) || !segment_clear(scene, *bounce, rx, i, -1))
            continue;

        RayPath ray;
        const double d = distance(tx, *bounce) + distance(*bounce, rx);
        ray.kind = RayKind::SingleReflection;
        ray.power = free_space_power(lambda, d) * loss_linear(scene.surfaces[i].reflection_loss_db);
        ray.delay_s = d / kSpeedOfLight;
        ray.aoa_rad = azimuth(rx, *bounce);
        ray.first_bounce = *bounce;
        ray.last_bounce = *bounce;
        rays.push_back(ray);
    }

    if (max_order < 2)
        return rays;

    // second-order reflections: mirror Tx across surface i, then across j
    for (int i = 0; i < n_surf; ++i)
    {
        const Polygon3 &pi = scene.surfaces[i].polygon;
        const Vec3 image1 = pi.mirror(tx);
        for (int j = 0; j < n_surf; ++j)
        {
            if (j == i)
                continue;
            const Polygon3 &pj = scene.surfaces[j].polygon;
            const Vec3 image2 = pj.mirror(image1);

            const auto b2 = pj.segment_intersection(image2, rx);
            if (!b2)
                continue;
            const auto b1 = pi.segment_intersection(image1, *b2);
            if (!b1)
                continue;
            if (distance(*b1, *b2) < kEndpointTol)
                continue;
            if (!segment_clear(scene, tx, *b1, -1, i) || !segment_clear(scene, *b1, *b2, i, j) ||
                !segment_clear(scene, *b2, rx, j, -1))
                continue;

            RayPath ray;
            const double d = distance(tx, *b1) + distance(*b1, *b2) + distance(*b2, rx);
            ray.kind = RayKind::DoubleReflection;
            ray.power = free_space_power(lambda, d) * loss_linear(scene.surfaces[i].reflection_loss_db) *
                        loss_linear(scene.surfaces[j].reflection_loss_db);
            ray.delay_s = d / kSpeedOfLight;
            ray.aoa_rad = azimuth(rx, *b2);
            ray.first_bounce = *b1;
            ray.last_bounce = *b2;
            rays.push_back(ray);
        }
    }

    return rays;
}

} // namespace chanmap
