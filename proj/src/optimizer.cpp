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

#include "chanmap/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace chanmap
{

double cosine_lr(double base_lr, long step, long t_max)
{
    if (t_max <= 0)
        return base_lr;
    const double t = static_cast<double>(std::clamp(step, 0L, t_max));
    return base_lr * 0.5 * (1.0 + std::cos(std::numbers::pi * t / static_cast<double>(t_max)));
}

double global_grad_norm(const Gradients &grads)
{
    double sq = 0.0;
    for (const TensorRef &t : tensor_views(const_cast<Gradients &>(grads)))
        for (std::size_t i = 0; i < t.size; ++i)
            sq += t.data[i] * t.data[i];
    return std::sqrt(sq);
}

void adamw_step(GnnParams &params, const Gradients &grads, AdamWState &state, const AdamWConfig &cfg)
{
    const std::vector<TensorRef> g = tensor_views(const_cast<Gradients &>(grads));
    for (const TensorRef &t : g)
        for (std::size_t i = 0; i < t.size; ++i)
            if (!std::isfinite(t.data[i]))
                throw std::runtime_error("adamw_step: non-finite gradient in " + t.name + ", step rejected");

    double clip_scale = 1.0;
    if (std::isfinite(cfg.clip_norm))
    {
        const double norm = global_grad_norm(grads);
        if (norm > cfg.clip_norm && norm > 0.0)
            clip_scale = cfg.clip_norm / norm;
    }

    const long t_step = state.step + 1;
    const double lr = cosine_lr(cfg.lr, t_step, cfg.t_max);
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t_step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t_step));

    const std::vector<TensorRef> p = tensor_views(params);
    const std::vector<TensorRef> m = tensor_views(state.m);
    const std::vector<TensorRef> v = tensor_views(state.v);

    for (std::size_t k = 0; k < p.size(); ++k)
    {
        for (std::size_t i = 0; i < p[k].size; ++i)
        {
            const double grad = g[k].data[i] * clip_scale;
            m[k].data[i] = cfg.beta1 * m[k].data[i] + (1.0 - cfg.beta1) * grad;
            v[k].data[i] = cfg.beta2 * v[k].data[i] + (1.0 - cfg.beta2) * grad * grad;
            const double m_hat = m[k].data[i] / bc1;
            const double v_hat = v[k].data[i] / bc2;
            p[k].data[i] -= lr * (m_hat / (std::sqrt(v_hat) + cfg.eps) + cfg.weight_decay * p[k].data[i]);
        }
    }
    state.step = t_step;
}

} // namespace chanmap
