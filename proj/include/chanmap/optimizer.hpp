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

#include <limits>

#include "chanmap/gnn.hpp"

namespace chanmap
{

struct AdamWConfig
{
    double lr = 1e-3;
    double weight_decay = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double clip_norm = 1.0; // +infinity disables clipping
    long t_max = 500;       // cosine horizon, lr(t_max) == 0
};

struct AdamWState
{
    Gradients m, v;
    long step = 0;

    static AdamWState init(const GnnParams &params)
    {
        return {zeros_like(params), zeros_like(params), 0};
    }
};

// lr(t) = base * (1 + cos(pi * t / t_max)) / 2, clamped to [0, t_max]
double cosine_lr(double base_lr, long step, long t_max);

double global_grad_norm(const Gradients &grads);

// Decoupled weight decay, bias-corrected moments, global-norm clipping before
// the moment update. Throws on non-finite gradients without touching state.
void adamw_step(GnnParams &params, const Gradients &grads, AdamWState &state, const AdamWConfig &cfg);

} // namespace chanmap
