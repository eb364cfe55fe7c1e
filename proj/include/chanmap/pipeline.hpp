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
#include <string>
#include <vector>

#include "chanmap/hcm.hpp"
#include "chanmap/map_io.hpp"
#include "chanmap/metrics.hpp"
#include "chanmap/trainer.hpp"

namespace chanmap
{

// Evenly strided observed-node selection. For counts divisible by the row
// count, whole columns are strided along the long axis; otherwise flattened
// indices are strided. rule: "uniform" (default) or "random".
std::vector<std::uint8_t> select_observed(const LocationGrid &grid, std::size_t count, const std::string &rule,
                                          std::uint64_t seed);

// Node features, priors, standardizer and per-node magnitude distributions
// assembled from a map and an observed mask.
struct NodeFeatures
{
    MatRM x0;         // standardized network inputs (3NL in polar mode)
    MatRM priors_std; // standardized 2NL targets for the prior-consistency loss
    Standardizer standardizer;
    std::vector<EmpiricalDistribution> dists;
    std::vector<ChannelMatrix> idw; // per node: observation itself, or its IDW interpolation
};

NodeFeatures build_node_features(const std::vector<ChannelMatrix> &map,
                                 const std::vector<std::pair<double, double>> &coords,
                                 const std::vector<std::uint8_t> &observed_mask, FeatureMode mode,
                                 double idw_power, bool use_prior);

struct RunConfig
{
    std::string scene_path;
    // grid overrides; zero values defer to the scene's [grid] section
    std::size_t grid_rows = 0, grid_cols = 0;
    double grid_spacing = 0.0;
    double origin_x = 0.0, origin_y = 0.0;
    double rx_height = -1.0;

    MapConfig map{};
    std::size_t observed_count = 100;
    std::string observed_rule = "uniform";

    std::size_t knn = 10;
    double tau_w = 0.0; // <= 0: median rule
    FeatureMode mode = FeatureMode::Concat;
    GraphMetric metric = GraphMetric::Wasserstein;
    double idw_power = 2.0;
    bool use_prior = true;

    TrainConfig train{};
    std::uint64_t seed = 1;

    // experiment sweep
    std::vector<std::size_t> densities = {25, 50, 100, 200};
    std::vector<std::uint64_t> seeds = {1, 2, 3};
    bool ablations = true;
};

RunConfig parse_run_config(const std::string &text);
RunConfig load_run_config(const std::string &path);

LocationGrid resolve_grid(const Scene &scene, const RunConfig &cfg);

// Full pipeline: simulate, mask, graph, train, infer, evaluate; artifacts
// (map.bin, mask.csv, graph.bin, ckpt.bin, pred.bin, log.csv, report.json)
// are written under out_dir.
EvalReport run_pipeline(const RunConfig &cfg, const std::string &out_dir);

struct SweepRow
{
    std::size_t density = 0;
    std::string variant; // full | no_w_edges | no_prior | idw
    std::uint64_t seed = 0;
    double nmse = 0.0;
    double train_s = 0.0, infer_s = 0.0;
};

struct SweepTable
{
    std::vector<SweepRow> rows;
    bool full_monotone = false; // median full-variant NMSE non-increasing in density

    double median_nmse(std::size_t density, const std::string &variant) const;
};

// Density sweep with ablation variants; one truth map shared across cells.
// Writes sweep.csv under out_dir.
SweepTable run_experiment(const RunConfig &base, const std::string &out_dir);

void write_sweep_csv(const SweepTable &table, const std::string &path);

} // namespace chanmap
