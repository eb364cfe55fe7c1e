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
#include <optional>
#include <string>
#include <vector>

#include "chanmap/cir.hpp"

namespace chanmap
{

// Global-ratio NMSE over the listed nodes: sum ||pred-truth||^2 / sum ||truth||^2.
// Distinct from the per-node-normalized reconstruction loss used in training.
double nmse(const std::vector<ChannelMatrix> &pred, const std::vector<ChannelMatrix> &truth,
            const std::vector<std::uint32_t> &nodes);

struct DispersionStats
{
    double tau_mean = 0.0; // mean excess delay (s)
    double tau_rms = 0.0;  // RMS delay spread (s)
    double phi_mean = 0.0; // mean azimuth (rad)
    double phi_rms = 0.0;  // RMS angular spread (rad)
    std::size_t node_index = 0;
};

// Power-weighted delay/angle dispersion of a CIR. Throws on empty input.
DispersionStats dispersion(const Cir &cir);

// Power per delay bin; bins auto-extend to cover every tap so binned power
// equals total tap power exactly. max_delay_s <= 0 derives the span from taps.
std::vector<double> delay_psd(const Cir &cir, double bin_width_s, double max_delay_s = 0.0);

// Right-continuous empirical CDF as (value, probability) steps.
std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> values);

struct StageTimings
{
    double model_stage_s = 0.0; // channel generation
    double data_stage_s = 0.0;  // network inference
};

struct EvalReport
{
    double nmse_gnn = 0.0;
    std::optional<double> nmse_idw;
    std::vector<double> sq_err;    // per node ||pred - truth||_F^2
    std::vector<double> power_map; // per node predicted ||h||_F^2
    std::vector<double> ds_map;    // per node RMS delay spread (when CIRs given)
    std::vector<double> as_map;    // per node RMS angular spread
    std::vector<std::pair<double, double>> power_cdf, ds_cdf, as_cdf;
    StageTimings timings;
};

EvalReport evaluate_pipeline(const std::vector<ChannelMatrix> &truth, const std::vector<ChannelMatrix> &pred,
                             const std::vector<std::uint8_t> &observed_mask, const StageTimings &timings,
                             const std::vector<Cir> *cirs = nullptr,
                             const std::vector<ChannelMatrix> *idw_pred = nullptr);

std::string report_to_json(const EvalReport &report);
void write_report(const EvalReport &report, const std::string &path);

} // namespace chanmap
