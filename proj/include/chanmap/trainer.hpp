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

#include "chanmap/losses.hpp"
#include "chanmap/optimizer.hpp"

namespace chanmap
{

struct TrainConfig
{
    AdamWConfig opt{};
    LossWeights loss{};
    double dropout = 0.1;
    std::size_t hidden = 64;
    std::size_t n_layers = 2;
    std::size_t filter_hidden = 32;
    long max_epochs = 500;
    long patience = 40;        // early stop after this many epochs without val improvement
    double val_fraction = 0.1; // observed nodes held out for validation
    std::size_t sample_k = 0;  // 0 = full neighborhood
    std::uint64_t seed = 1;
    bool debug_dual_smoothness = false; // cross-check edge-sum vs trace form each epoch (small graphs)
};

struct EpochLog
{
    long epoch = 0;
    double l_r = 0.0, l_s = 0.0, l_p = 0.0, total = 0.0;
    double val_nmse = 0.0;
    double lr = 0.0;
    double seconds = 0.0;
};

struct TrainResult
{
    GnnParams params; // best validation checkpoint
    std::vector<EpochLog> log;
    double best_val_nmse = 0.0;
    long best_epoch = 0;
    double train_seconds = 0.0;
    std::vector<std::uint32_t> train_nodes, val_nodes;
};

// Full-graph training of the two-block message-passing network under the
// composite loss, AdamW with cosine decay, gradient clipping and validation
// early stopping. Deterministic for a fixed seed.
TrainResult train_gnn(const SpatialGraph &graph, const MatRM &x0_std, const MatRM &priors_std,
                      const std::vector<ChannelMatrix> &truth, const std::vector<std::uint8_t> &observed_mask,
                      const Standardizer &standardizer, FeatureMode mode, std::size_t n_antennas,
                      std::size_t n_subcarriers, const TrainConfig &cfg);

void write_training_log(const std::vector<EpochLog> &log, const std::string &path);

} // namespace chanmap
