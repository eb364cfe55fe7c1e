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
#include <vector>

#include "chanmap/gnn.hpp"

namespace chanmap
{

struct LossWeights
{
    double lambda = 0.1; // smoothness weight
    double eta = 0.1;    // prior-consistency weight
    double eps = 1e-12;  // reconstruction stabilizer
};

// Mean over observed nodes of ||pred - truth||_F^2 / (||truth||_F^2 + eps),
// in physical units.
double loss_reconstruction(const std::vector<ChannelMatrix> &pred, const std::vector<ChannelMatrix> &truth,
                           const std::vector<std::uint32_t> &observed, double eps);

// (lambda / |E|) * sum over undirected edges of w_uv ||y_u - y_v||^2.
double loss_smoothness(const MatRM &y, const SpatialGraph &graph, double lambda);

// Same quantity through the dense trace form tr(Y^T L Y); small graphs only.
double loss_smoothness_trace(const MatRM &y, const SpatialGraph &graph, double lambda);

// (eta / |V_unobs|) * sum over unobserved nodes of ||y_j - prior_j||^2.
double loss_prior(const MatRM &y, const MatRM &priors, const std::vector<std::uint32_t> &unobserved, double eta);

// Composite loss in the training representation: the reconstruction term is
// evaluated in physical space (through the inverse standardizer and complex
// decoding), smoothness and prior terms in standardized space. d_y is the
// exact gradient with respect to the network outputs.
struct CompositeLossResult
{
    double l_r = 0.0, l_s = 0.0, l_p = 0.0;
    double total() const { return l_r + l_s + l_p; }
    MatRM d_y;
};

CompositeLossResult composite_loss(const MatRM &y_std, const SpatialGraph &graph, const Standardizer &standardizer,
                                   FeatureMode mode, std::size_t n_antennas, std::size_t n_subcarriers,
                                   const std::vector<ChannelMatrix> &truth,
                                   const std::vector<std::uint32_t> &observed_train,
                                   const std::vector<std::uint32_t> &unobserved, const MatRM &priors_std,
                                   const LossWeights &weights);

} // namespace chanmap
