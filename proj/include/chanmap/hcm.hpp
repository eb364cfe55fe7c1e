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
#include <limits>
#include <vector>

#include "chanmap/cir.hpp"
#include "chanmap/scene.hpp"
#include "chanmap/tracer.hpp"

namespace chanmap
{

// Power ratios of the specular component to the dynamic and diffuse
// components. +infinity disables the respective component.
struct MixRatios
{
    double k_d = 3.1622776601683795;   // 5 dB
    double k_dmc = 3.1622776601683795; // 5 dB

    static MixRatios from_db(double k_d_db, double k_dmc_db);

    struct Weights
    {
        double w_rt, w_d, w_dmc;
    };
    Weights weights() const; // squared weights sum to 1 for finite ratios
};

// Diffuse-multipath configuration. Sub-ray clusters are anchored in pairs at
// each reflected ray's first and last bounce points.
struct DmcConfig
{
    double k_dmc = 1.0;            // total RT power / total raw DMC power
    int rays_per_pair = 10;        // M_k
    double delay_spread_s = 25e-9; // exponential excess-delay constant
    double angle_spread_rad = 0.1; // Gaussian AoA spread around the anchor direction
};

// Birth-death process configuration for moving-scatterer clusters.
struct DynamicConfig
{
    double visibility_radius_m = 15.0;
    int rays_per_cluster = 8; // center of the M_n draw
    int rays_jitter = 3;      // M_n uniform in [center - jitter, center + jitter], floored at 1
    double delay_spread_s = 30e-9;
    double angle_spread_rad = 0.1;
    double step_dt_s = 0.05; // evolution step used by generate_map
};

struct DynamicCluster
{
    std::size_t object_index = 0;
    double birth_t = 0.0;
    int m_rays = 0;
    // per-ray offsets, fixed at birth
    std::vector<double> delay_offset_s;
    std::vector<double> power_weight; // sums to 1
    std::vector<double> angle_offset_rad;
    // centroid values, tracked while alive
    double centroid_delay_s = 0.0;
    double centroid_power = 0.0;
    double centroid_aoa_rad = 0.0;
};

struct DynamicClusterState
{
    std::vector<DynamicCluster> alive;
    std::vector<std::uint32_t> birth_counts; // per object
    double t = 0.0;
    bool initialized = false;
    std::size_t node_index = 0;
};

// Advance the state to time t in steps of dt (last step clamped). Clusters
// are born when an object is active and within the visibility radius of rx,
// and die when it deactivates or leaves. Deterministic given the seed.
DynamicClusterState evolve_dynamic(DynamicClusterState state, const Scene &scene, const Vec3 &rx,
                                   std::size_t node_index, double t, double dt, std::uint64_t seed,
                                   const DynamicConfig &cfg = {});

// Specular CIR per the ray list: one tap sqrt(P) * exp(j 2 pi f_c tau) per ray.
Cir rt_cir(const std::vector<RayPath> &rays, double f_c);

// CIR of all alive dynamic clusters at time t.
Cir dynamic_cir(const DynamicClusterState &state, double f_c, double t);

// Diffuse CIR: for every reflected ray, a cluster pair at its first/last
// bounce contributes rays_per_pair sub-rays with Exp-distributed excess delay
// and exponentially decaying power. Total raw power equals
// (total RT ray power) / cfg.k_dmc. LoS-only ray lists produce an empty CIR.
Cir dmc_cir(const std::vector<RayPath> &rays, const DmcConfig &cfg, double f_c, std::uint64_t seed, const Vec3 &rx);

// Mix the three components and concatenate taps. Throws on node/t mismatch.
Cir combine_cir(const Cir &rt, const Cir &dyn, const Cir &dmc, const MixRatios &ratios);

// Synthesize the N x L matrix: entry (a, f) sums
//   amp * exp(-j 2 pi f_f tau) * exp(-j 2 pi (a Delta / lambda) sin(aoa))
// over taps, with subcarrier offsets f_f centered on the carrier.
ChannelMatrix cir_to_matrix(const Cir &cir, std::size_t n_antennas, double antenna_spacing_m,
                            std::size_t n_subcarriers, double bandwidth_hz, double carrier_hz);

struct MapConfig
{
    double t = 0.0;
    MixRatios ratios{};
    DmcConfig dmc{};
    DynamicConfig dynamic{};
    std::size_t n_antennas = 4;
    std::size_t n_subcarriers = 16;
    double antenna_spacing_m = 0.0; // <= 0 selects half a wavelength
};

struct GeneratedMap
{
    std::vector<ChannelMatrix> matrices; // grid order
    std::vector<Cir> cirs;               // combined CIR per node
    double elapsed_s = 0.0;
};

// One channel matrix per grid node at cfg.t. Per-node RNG streams derive from
// (seed, node); nodes are independent, so parallel and serial execution give
// identical output.
GeneratedMap generate_map(const Scene &scene, const LocationGrid &grid, const MapConfig &cfg, std::uint64_t seed);

// Same, restricted to a subset of node indices (positions taken from `grid`
// when idx < grid.n_nodes, else from `extra` at idx - grid.n_nodes).
GeneratedMap generate_map_subset(const Scene &scene, const LocationGrid &grid,
                                 const std::vector<std::pair<double, double>> &extra,
                                 const std::vector<std::size_t> &nodes, const MapConfig &cfg, std::uint64_t seed);

} // namespace chanmap
