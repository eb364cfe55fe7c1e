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

#include "chanmap/hcm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "chanmap/parallel.hpp"
#include "chanmap/rng.hpp"

namespace chanmap
{

MixRatios MixRatios::from_db(double k_d_db, double k_dmc_db)
{
    MixRatios r;
    r.k_d = std::pow(10.0, k_d_db / 10.0);
    r.k_dmc = std::pow(10.0, k_dmc_db / 10.0);
    return r;
}

MixRatios::Weights MixRatios::weights() const
{
    if (k_d <= 0.0 || k_dmc <= 0.0)
        throw std::invalid_argument("mix ratios must be > 0");
    const double inv_d = std::isinf(k_d) ? 0.0 : 1.0 / k_d;
    const double inv_dmc = std::isinf(k_dmc) ? 0.0 : 1.0 / k_dmc;
    const double denom = inv_d + inv_dmc + 1.0;
    return {std::sqrt(1.0 / denom), std::sqrt(inv_d / denom), std::sqrt(inv_dmc / denom)};
}

Cir rt_cir(const std::vector<RayPath> &rays, double f_c)
{
    if (f_c <= 0.0)
        throw std::invalid_argument("rt_cir: carrier must be > 0");
    Cir cir;
    cir.taps.reserve(rays.size());
    for (const RayPath &ray : rays)
    {
        const double phase = 2.0 * std::numbers::pi * f_c * ray.delay_s;
        cir.taps.push_back({std::sqrt(ray.power) * std::complex<double>(std::cos(phase), std::sin(phase)),
                            ray.delay_s, ray.aoa_rad});
    }
    return cir;
}

namespace
{

// bistatic free-space scattering: P = g * lambda^2 / ((4 pi)^3 d_tx^2 d_rx^2)
double scatter_power(double lambda, double d_tx, double d_rx, double gain_db)
{
    const double four_pi = 4.0 * std::numbers::pi;
    return std::pow(10.0, gain_db / 10.0) * lambda * lambda /
           (four_pi * four_pi * four_pi * d_tx * d_tx * d_rx * d_rx);
}

void update_centroid(DynamicCluster &cluster, const Scene &scene, const Vec3 &rx, double t)
{
    const DynamicObject &obj = scene.dynamic_objects[cluster.object_index];
    const Vec3 pos = object_position(obj, t);
    const double d_tx = distance(scene.tx_position, pos);
    const double d_rx = distance(pos, rx);
    cluster.centroid_delay_s = (d_tx + d_rx) / kSpeedOfLight;
    cluster.centroid_power = scatter_power(scene.wavelength(), std::max(d_tx, 0.1), std::max(d_rx, 0.1),
                                           obj.scatter_gain_db);
    cluster.centroid_aoa_rad = azimuth(rx, pos);
}

void dynamic_step(DynamicClusterState &state, const Scene &scene, const Vec3 &rx, double t, std::uint64_t seed,
                  const DynamicConfig &cfg)
{
    for (std::size_t oi = 0; oi < scene.dynamic_objects.size(); ++oi)
    {
        const DynamicObject &obj = scene.dynamic_objects[oi];

        bool active = t >= obj.t_start && t <= obj.t_end && !obj.waypoints.empty() &&
                      t >= obj.waypoints.front().first && t <= obj.waypoints.back().first;
        if (active)
            active = distance(object_position(obj, t), rx) <= cfg.visibility_radius_m;

        auto it = std::find_if(state.alive.begin(), state.alive.end(),
                               [oi](const DynamicCluster &c) { return c.object_index == oi; });

        if (!active)
        {
            if (it != state.alive.end())
                state.alive.erase(it);
            continue;
        }

        if (it == state.alive.end())
        {
            // birth: draw the per-ray offsets once
            Rng rng(Rng::derive(seed, state.node_index, oi, state.birth_counts[oi]));
            state.birth_counts[oi]++;

            DynamicCluster cluster;
            cluster.object_index = oi;
            cluster.birth_t = t;
            const int lo = std::max(1, cfg.rays_per_cluster - cfg.rays_jitter);
            const int hi = cfg.rays_per_cluster + cfg.rays_jitter;
            cluster.m_rays = lo + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(hi - lo + 1)));

            double weight_sum = 0.0;
            for (int r = 0; r < cluster.m_rays; ++r)
            {
                const double off = (r == 0) ? 0.0 : rng.exponential(cfg.delay_spread_s);
                cluster.delay_offset_s.push_back(off);
                cluster.power_weight.push_back(std::exp(-off / cfg.delay_spread_s));
                cluster.angle_offset_rad.push_back((r == 0) ? 0.0 : rng.gaussian() * cfg.angle_spread_rad);
                weight_sum += cluster.power_weight.back();
            }
            for (double &w : cluster.power_weight)
                w /= weight_sum;

            update_centroid(cluster, scene, rx, t);
            state.alive.push_back(std::move(cluster));
        }
        else
        {
            update_centroid(*it, scene, rx, t);
        }
    }
    state.t = t;
    state.initialized = true;
}

} // namespace

DynamicClusterState evolve_dynamic(DynamicClusterState state, const Scene &scene, const Vec3 &rx,
                                   std::size_t node_index, double t, double dt, std::uint64_t seed,
                                   const DynamicConfig &cfg)
{
    if (dt <= 0.0)
        throw std::invalid_argument("evolve_dynamic: dt must be > 0");
    state.node_index = node_index;
    if (state.birth_counts.size() != scene.dynamic_objects.size())
        state.birth_counts.assign(scene.dynamic_objects.size(), 0);

    if (!state.initialized)
    {
        dynamic_step(state, scene, rx, t, seed, cfg);
        return state;
    }

    while (state.t + dt < t - 1e-12)
        dynamic_step(state, scene, rx, state.t + dt, seed, cfg);
    if (t > state.t + 1e-12)
        dynamic_step(state, scene, rx, t, seed, cfg);
    return state;
}

Cir dynamic_cir(const DynamicClusterState &state, double f_c, double t)
{
    Cir cir;
    cir.t = t;
    cir.node_index = state.node_index;
    for (const DynamicCluster &cluster : state.alive)
    {
        for (int r = 0; r < cluster.m_rays; ++r)
        {
            const double tau = cluster.centroid_delay_s + cluster.delay_offset_s[r];
            const double p = cluster.centroid_power * cluster.power_weight[r];
            const double phase = 2.0 * std::numbers::pi * f_c * tau;
            cir.taps.push_back({std::sqrt(p) * std::complex<double>(std::cos(phase), std::sin(phase)), tau,
                                cluster.centroid_aoa_rad + cluster.angle_offset_rad[r]});
        }
    }
    return cir;
}

Cir dmc_cir(const std::vector<RayPath> &rays, const DmcConfig &cfg, double f_c, std::uint64_t seed, const Vec3 &rx)
{
    if (cfg.k_dmc <= 0.0 || cfg.rays_per_pair < 1 || cfg.delay_spread_s <= 0.0 || cfg.angle_spread_rad <= 0.0)
        throw std::invalid_argument("dmc_cir: invalid configuration");

    Cir cir;
    double rt_power = 0.0;
    double parent_power = 0.0;
    for (const RayPath &ray : rays)
    {
        rt_power += ray.power;
        if (ray.kind != RayKind::LoS)
            parent_power += ray.power;
    }
    if (parent_power <= 0.0)
        return cir; // no bounce anchors

    const double total_budget = rt_power / cfg.k_dmc;

    struct SubRay
    {
        double power, delay, aoa;
    };

    for (std::size_t k = 0; k < rays.size(); ++k)
    {
        const RayPath &ray = rays[k];
        if (ray.kind == RayKind::LoS)
            continue;

        Rng rng(Rng::derive(seed, k, 0xD31Cull));
        const double budget = total_budget * (ray.power / parent_power);
        const double aoa_a = azimuth(rx, *ray.first_bounce); // Tx-side anchor seen from the receiver
        const double aoa_z = azimuth(rx, *ray.last_bounce);

        std::vector<SubRay> side_a, side_z;
        double sum_a = 0.0, sum_z = 0.0;
        for (int r = 0; r < cfg.rays_per_pair; ++r)
        {
            const bool at_a = (r % 2 == 0);
            const double excess = rng.exponential(cfg.delay_spread_s);
            const double raw = std::exp(-excess / cfg.delay_spread_s);
            const double aoa = (at_a ? aoa_a : aoa_z) + rng.gaussian() * cfg.angle_spread_rad;
            if (at_a)
            {
                side_a.push_back({raw, ray.delay_s + excess, aoa});
                sum_a += raw;
            }
            else
            {
                side_z.push_back({raw, ray.delay_s + excess, aoa});
                sum_z += raw;
            }
        }

        // the pair's budget is split evenly between the two anchors
        const double budget_a = side_z.empty() ? budget : budget * 0.5;
        const double budget_z = side_a.empty() ? budget : budget * 0.5;
        auto emit = [&](const std::vector<SubRay> &side, double side_budget, double raw_sum)
        {
            for (const SubRay &s : side)
            {
                const double p = side_budget * (s.power / raw_sum);
                const double phase = 2.0 * std::numbers::pi * f_c * s.delay;
                cir.taps.push_back(
                    {std::sqrt(p) * std::complex<double>(std::cos(phase), std::sin(phase)), s.delay, s.aoa});
            }
        };
        if (!side_a.empty())
            emit(side_a, budget_a, sum_a);
        if (!side_z.empty())
            emit(side_z, budget_z, sum_z);
    }
    return cir;
}

Cir combine_cir(const Cir &rt, const Cir &dyn, const Cir &dmc, const MixRatios &ratios)
{
    if (rt.node_index != dyn.node_index || rt.node_index != dmc.node_index)
        throw std::invalid_argument("combine_cir: node index mismatch");
    if (rt.t != dyn.t || rt.t != dmc.t)
        throw std::invalid_argument("combine_cir: time mismatch");

    const MixRatios::Weights w = ratios.weights();
    Cir out;
    out.t = rt.t;
    out.node_index = rt.node_index;
    out.taps.reserve(rt.taps.size() + dyn.taps.size() + dmc.taps.size());
    for (const CirTap &tap : rt.taps)
        out.taps.push_back({tap.amp * w.w_rt, tap.delay_s, tap.aoa_rad});
    for (const CirTap &tap : dyn.taps)
        out.taps.push_back({tap.amp * w.w_d, tap.delay_s, tap.aoa_rad});
    for (const CirTap &tap : dmc.taps)
        out.taps.push_back({tap.amp * w.w_dmc, tap.delay_s, tap.aoa_rad});
    return out;
}

ChannelMatrix cir_to_matrix(const Cir &cir, std::size_t n_antennas, double antenna_spacing_m,
                            std::size_t n_subcarriers, double bandwidth_hz, double carrier_hz)
{
    if (n_antennas < 1 || n_subcarriers < 1)
        throw std::invalid_argument("cir_to_matrix: N and L must be >= 1");

    ChannelMatrix h;
    h.node_index = cir.node_index;
    h.t = cir.t;
    h.entries = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n_antennas),
                                       static_cast<Eigen::Index>(n_subcarriers));

    const double lambda = kSpeedOfLight / carrier_hz;
    const double delta_f = bandwidth_hz / static_cast<double>(n_subcarriers);
    const double two_pi = 2.0 * std::numbers::pi;

    for (const CirTap &tap : cir.taps)
    {
        const double sin_aoa = std::sin(tap.aoa_rad);
        for (std::size_t a = 0; a < n_antennas; ++a)
        {
            const double steer = -two_pi * (static_cast<double>(a) * antenna_spacing_m / lambda) * sin_aoa;
            const std::complex<double> amp_a =
                tap.amp * std::complex<double>(std::cos(steer), std::sin(steer));
            for (std::size_t f = 0; f < n_subcarriers; ++f)
            {
                const double f_off = (static_cast<double>(f) - 0.5 * static_cast<double>(n_subcarriers - 1)) * delta_f;
                const double ph = -two_pi * f_off * tap.delay_s;
                h.entries(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(f)) +=
                    amp_a * std::complex<double>(std::cos(ph), std::sin(ph));
            }
        }
    }
    return h;
}

namespace
{

void generate_node(const Scene &scene, const Vec3 &rx, std::size_t node, const MapConfig &cfg, std::uint64_t seed,
                   double spacing, ChannelMatrix &matrix_out, Cir &cir_out)
{
    const std::vector<RayPath> rays = trace_specular(scene, rx);

    Cir rt = rt_cir(rays, scene.carrier_hz);
    rt.node_index = node;
    rt.t = cfg.t;

    Cir dmc = dmc_cir(rays, cfg.dmc, scene.carrier_hz, Rng::derive(seed, node, 0xD3Cull), rx);
    dmc.node_index = node;
    dmc.t = cfg.t;

    Cir dyn;
    dyn.node_index = node;
    dyn.t = cfg.t;
    if (!scene.dynamic_objects.empty())
    {
        DynamicClusterState state;
        state = evolve_dynamic(std::move(state), scene, rx, node, 0.0, cfg.dynamic.step_dt_s,
                               Rng::derive(seed, 0xD15ull), cfg.dynamic);
        if (cfg.t > 0.0)
            state = evolve_dynamic(std::move(state), scene, rx, node, cfg.t, cfg.dynamic.step_dt_s,
                                   Rng::derive(seed, 0xD15ull), cfg.dynamic);
        dyn = dynamic_cir(state, scene.carrier_hz, cfg.t);
        dyn.node_index = node;
        dyn.t = cfg.t;
    }

    cir_out = combine_cir(rt, dyn, dmc, cfg.ratios);
    matrix_out = cir_to_matrix(cir_out, cfg.n_antennas, spacing, cfg.n_subcarriers, scene.bandwidth_hz,
                               scene.carrier_hz);
}

} // namespace

GeneratedMap generate_map(const Scene &scene, const LocationGrid &grid, const MapConfig &cfg, std::uint64_t seed)
{
    std::vector<std::size_t> nodes(grid.n_nodes());
    for (std::size_t i = 0; i < nodes.size(); ++i)
        nodes[i] = i;
    return generate_map_subset(scene, grid, {}, nodes, cfg, seed);
}

GeneratedMap generate_map_subset(const Scene &scene, const LocationGrid &grid,
                                 const std::vector<std::pair<double, double>> &extra,
                                 const std::vector<std::size_t> &nodes, const MapConfig &cfg, std::uint64_t seed)
{
    const auto t_start = std::chrono::steady_clock::now();

    const double spacing = cfg.antenna_spacing_m > 0.0 ? cfg.antenna_spacing_m : 0.5 * scene.wavelength();

    GeneratedMap out;
    out.matrices.resize(nodes.size());
    out.cirs.resize(nodes.size());

    parallel_blocks(nodes.size(),
                    [&](std::size_t begin, std::size_t end, std::size_t)
                    {
                        for (std::size_t i = begin; i < end; ++i)
                        {
                            const std::size_t node = nodes[i];
                            Vec3 rx;
                            if (node < grid.n_nodes())
                                rx = grid.node_position(node);
                            else
                            {
                                const auto &[x, y] = extra[node - grid.n_nodes()];
                                rx = {x, y, grid.rx_height};
                            }
                            generate_node(scene, rx, node, cfg, seed, spacing, out.matrices[i], out.cirs[i]);
                        }
                    });

    out.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return out;
}

} // namespace chanmap
