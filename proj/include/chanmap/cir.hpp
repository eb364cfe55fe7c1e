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

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "chanmap/geometry.hpp"

namespace chanmap
{

enum class RayKind
{
    LoS,
    SingleReflection,
    DoubleReflection
};

// One specular propagation path between Tx and a receiver point.
struct RayPath
{
    double power = 0.0;   // linear power at the receiver
    double delay_s = 0.0; // path length / c
    double aoa_rad = 0.0; // azimuth of arrival at the receiver
    std::optional<Vec3> first_bounce;
    std::optional<Vec3> last_bounce;
    RayKind kind = RayKind::LoS;
};

struct CirTap
{
    std::complex<double> amp;
    double delay_s = 0.0;
    double aoa_rad = 0.0;
};

// Tapped channel impulse response at one grid node and time instant.
// Taps keep exact continuous delays; binning happens only in the delay-PSD
// evaluation and in the matrix synthesis.
struct Cir
{
    std::vector<CirTap> taps;
    double t = 0.0;
    std::size_t node_index = 0;

    double total_power() const
    {
        double p = 0.0;
        for (const CirTap &tap : taps)
            p += std::norm(tap.amp);
        return p;
    }
    double max_delay() const
    {
        double d = 0.0;
        for (const CirTap &tap : taps)
            d = std::max(d, tap.delay_s);
        return d;
    }
};

// Complex N x L channel matrix (rows: rx antennas, cols: subcarriers).
struct ChannelMatrix
{
    Eigen::MatrixXcd entries;
    std::size_t node_index = 0;
    double t = 0.0;

    std::size_t n_antennas() const { return static_cast<std::size_t>(entries.rows()); }
    std::size_t n_subcarriers() const { return static_cast<std::size_t>(entries.cols()); }
    double frobenius_sq() const { return entries.squaredNorm(); }
};

} // namespace chanmap
