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

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "chanmap/cir.hpp"

namespace chanmap
{

enum class FeatureMode
{
    Concat, // [vec(Re), vec(Im)]
    Polar   // [vec(|h|), vec(angle)], angle in (-pi, pi]
};

FeatureMode feature_mode_from_string(const std::string &s);
std::string to_string(FeatureMode mode);

// Complex N x L matrix -> real vector of length 2NL (column-major vec).
Eigen::VectorXd encode_features(const ChannelMatrix &h, FeatureMode mode);
ChannelMatrix decode_features(const Eigen::VectorXd &x, std::size_t n_antennas, std::size_t n_subcarriers,
                              FeatureMode mode);

// Polar-mode network input: [mag, sin(angle), cos(angle)], length 3NL.
// The magnitude half is expected to be standardized by the caller.
Eigen::VectorXd embed_polar_phase(const Eigen::VectorXd &polar_2nl);

// Per-dimension affine standardization fitted on observed nodes only.
struct Standardizer
{
    Eigen::VectorXd mean;
    Eigen::VectorXd std_dev; // population std, floored at 1e-8

    static Standardizer fit(const std::vector<Eigen::VectorXd> &observed); // throws if < 2 rows

    Eigen::VectorXd apply(const Eigen::VectorXd &x) const;
    Eigen::VectorXd invert(const Eigen::VectorXd &x) const;
};

// Inverse-distance weighted interpolation of complex channel matrices.
// Weights are d^-p normalized over all observed nodes; a target closer than
// 1e-9 m to an observation returns that observation exactly.
ChannelMatrix idw_prior(const std::pair<double, double> &target,
                        const std::vector<std::pair<double, double>> &observed_coords,
                        const std::vector<const ChannelMatrix *> &observed_h, double power);

// Sorted magnitudes of the N*L channel entries.
struct EmpiricalDistribution
{
    std::vector<double> samples; // ascending

    static EmpiricalDistribution from_matrix(const ChannelMatrix &h);
    static EmpiricalDistribution from_samples(std::vector<double> values); // sorts
};

// Exact 1-Wasserstein distance between two empirical distributions via the
// L1 distance of their CDFs (merged-breakpoint integration; the equal-size
// case reduces to the mean absolute difference of sorted samples).
double wasserstein_1d(const EmpiricalDistribution &u, const EmpiricalDistribution &v);

} // namespace chanmap
