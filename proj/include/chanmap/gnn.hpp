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
//
// Two-block message passing per layer: a SAGE mean-aggregation update
// (learnable affine + ReLU + LayerNorm + dropout) followed by an
// edge-conditioned refinement whose per-edge filters come from a small
// filter-generating MLP, with a residual connection after the activation.
// The backward pass computes exact analytic gradients for every parameter.

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "chanmap/spatial_graph.hpp"

namespace chanmap
{

struct GnnDims
{
    std::size_t input_dim = 0;       // D_0 (2NL in concat mode)
    std::size_t hidden_dim = 64;     // D
    std::size_t n_layers = 2;        // S
    std::size_t edge_dim = kEdgeFeatureDim;
    std::size_t filter_hidden = 32;  // filter-net hidden width
    std::size_t output_dim = 0;      // 2NL
    std::size_t out_hidden = 64;     // prediction-head hidden width

    std::size_t layer_in(std::size_t l) const { return l == 0 ? input_dim : hidden_dim; }
};

struct LayerParams
{
    Eigen::MatrixXd w_agg;   // D x 2*D_in
    Eigen::VectorXd b;       // D
    Eigen::VectorXd ln_gain; // D
    Eigen::VectorXd ln_bias; // D
    Eigen::MatrixXd filt_w1; // filter_hidden x edge_dim
    Eigen::VectorXd filt_b1; // filter_hidden
    Eigen::MatrixXd filt_w2; // D*D x filter_hidden
    Eigen::VectorXd filt_b2; // D*D
    Eigen::MatrixXd w_self;  // D x D
};

struct GnnParams
{
    GnnDims dims;
    std::vector<LayerParams> layers;
    Eigen::MatrixXd out_w1; // out_hidden x D
    Eigen::VectorXd out_b1;
    Eigen::MatrixXd out_w2; // output_dim x out_hidden
    Eigen::VectorXd out_b2;
};

// Gradients share the parameter shape tree.
using Gradients = GnnParams;

GnnParams init_params(const GnnDims &dims, std::uint64_t seed);
Gradients zeros_like(const GnnParams &params);

// Flat views over every tensor, in a fixed order (used by the optimizer,
// serialization and the finite-difference tests).
struct TensorRef
{
    std::string name;
    double *data;
    std::size_t size;
};
std::vector<TensorRef> tensor_views(GnnParams &params);
std::size_t parameter_count(const GnnParams &params);

struct ForwardOptions
{
    bool train_mode = false;
    double dropout_rate = 0.1;
    std::uint64_t dropout_seed = 0;
    std::size_t sample_k = 0; // 0 = full neighborhood
    std::uint64_t sample_seed = 0;
};

struct LayerTrace
{
    MatRM z_prev;            // layer input states
    MatRM m;                 // mean-aggregated neighbor states
    MatRM h1;                // post-ReLU SAGE pre-LayerNorm
    MatRM xhat;              // LayerNorm-normalized values
    Eigen::VectorXd inv_std; // per-node 1/sqrt(var + eps)
    MatRM mask;              // dropout scale (empty in eval mode)
    MatRM ztilde;            // refined-layer input
    MatRM filt_hidden;       // E x filter_hidden, post-ReLU
    MatRM y_basis;           // E-source basis products, n x (filter_hidden+1)*D
    MatRM act2;              // post-ReLU refinement, pre-residual
    std::shared_ptr<const ActiveEdges> edges;
};

struct ForwardTrace
{
    std::vector<LayerTrace> layers;
    MatRM z_final; // z^(S)
    MatRM o1;      // head hidden, post-ReLU
    MatRM y;       // n x output_dim (standardized space)
    bool train_mode = false;
};

// Full forward pass; y stays in the standardized feature space.
ForwardTrace gnn_forward(const SpatialGraph &graph, const MatRM &x0, const GnnParams &params,
                         const ForwardOptions &opts);

// Exact analytic gradients of a scalar loss with gradient d_y at the outputs.
Gradients gnn_backward(const SpatialGraph &graph, const GnnParams &params, const ForwardTrace &trace,
                       const MatRM &d_y);

// Inference: eval-mode forward only; params are never mutated.
MatRM infer_inductive(const SpatialGraph &graph, const MatRM &x0, const GnnParams &params);

// Physical-space predictions: invert standardization and decode each row.
std::vector<ChannelMatrix> predictions_to_matrices(const MatRM &y, const Standardizer &standardizer,
                                                   std::size_t n_antennas, std::size_t n_subcarriers,
                                                   FeatureMode mode);

// Checkpoint container: parameters plus everything inference needs.
struct Checkpoint
{
    GnnParams params;
    Standardizer standardizer;
    std::uint64_t n_antennas = 0, n_subcarriers = 0;
    FeatureMode mode = FeatureMode::Concat;
};

void write_checkpoint(const Checkpoint &ckpt, const std::string &path);
Checkpoint read_checkpoint(const std::string &path);
std::uint64_t params_hash(const GnnParams &params); // FNV-1a over serialized tensors

} // namespace chanmap
