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
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "chanmap/features.hpp"
#include "chanmap/scene.hpp"

namespace chanmap
{

using MatRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr std::size_t kEdgeFeatureDim = 5; // [dx, dy, d_euc, W, los]

enum class GraphMetric
{
    Wasserstein,
    Euclidean // ablation: KNN by geometric distance only
};

GraphMetric graph_metric_from_string(const std::string &s);
std::string to_string(GraphMetric metric);

// Directed edge arrays grouped by target (CSR) with a by-source permutation
// (CSC). Message passing aggregates over a node's CSR slice; backward scatter
// walks the CSC order so accumulation stays deterministic.
struct ActiveEdges
{
    std::size_t n_nodes = 0;
    std::vector<std::uint32_t> target, source; // directed, sorted by (target, source)
    std::vector<std::uint32_t> tgt_offsets;    // n_nodes + 1
    MatRM feat;                                // E x 5, oriented target<-source: dx = x_t - x_s
    std::vector<std::uint32_t> src_offsets;    // n_nodes + 1
    std::vector<std::uint32_t> src_perm;       // edge ids grouped by source

    std::size_t n_edges() const { return target.size(); }
    std::size_t degree(std::size_t k) const { return tgt_offsets[k + 1] - tgt_offsets[k]; }
};

// Settings needed to rebuild node features identically in later stages.
struct GraphBuildInfo
{
    std::uint32_t k = 10;
    GraphMetric metric = GraphMetric::Wasserstein;
    FeatureMode mode = FeatureMode::Concat;
    double idw_power = 2.0;
    bool use_prior = true;
};

struct SpatialGraph
{
    struct Edge
    {
        std::uint32_t u, v; // u < v
        double w_dist;      // W(u, v)
        double weight;      // exp(-W / tau_w)
        double los;         // 1 when both endpoints see the Tx
    };

    std::size_t n_nodes = 0;
    std::vector<std::pair<double, double>> coords;
    std::vector<Edge> edges; // undirected, each once
    double tau_w = 1.0;
    ActiveEdges full; // both directions, with edge features
    GraphBuildInfo build_info{};

    std::size_t degree(std::size_t k) const { return full.degree(k); }

    // sum over undirected edges of w_uv * ||x_u - x_v||^2 == tr(X^T L X)
    double laplacian_quadratic(const MatRM &x) const;

    Eigen::MatrixXd dense_adjacency() const;
    Eigen::MatrixXd dense_laplacian() const; // L = D - A
};

using LosFn = std::function<double(std::size_t, std::size_t)>;

// 1 iff both endpoints have an unobstructed path to the Tx.
int los_indicator(const Scene &scene, const Vec3 &u, const Vec3 &v);

// Pairwise LoS function with per-node Tx visibility cached.
LosFn make_scene_los_fn(const Scene &scene, const std::vector<std::pair<double, double>> &coords,
                        double rx_height);

// K-nearest-neighbor graph under the chosen metric, symmetrized by union
// (an edge is kept when either endpoint selects it); ties broken by ascending
// node index. tau_w <= 0 selects the median W over the selected edges.
SpatialGraph build_graph(const std::vector<EmpiricalDistribution> &dists,
                         const std::vector<std::pair<double, double>> &coords, std::size_t k, double tau_w,
                         const LosFn &los, GraphMetric metric = GraphMetric::Wasserstein);

// Inductive refresh: append nodes, computing KNN selections only for the new
// rows. Existing edges, tau_w and edge weights are preserved. all_dists must
// cover old and new nodes (old first).
SpatialGraph append_nodes(const SpatialGraph &base, const std::vector<EmpiricalDistribution> &all_dists,
                          const std::vector<std::pair<double, double>> &new_coords, const LosFn &los);

void write_graph(const SpatialGraph &graph, const std::string &path);
SpatialGraph read_graph(const std::string &path);
void write_edge_csv(const SpatialGraph &graph, const std::string &path);

} // namespace chanmap
