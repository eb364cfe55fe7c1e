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

#include "chanmap/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "chanmap/metrics.hpp"
#include "chanmap/rng.hpp"

namespace chanmap
{

TrainResult train_gnn(const SpatialGraph &graph, const MatRM &x0_std, const MatRM &priors_std,
                      const std::vector<ChannelMatrix> &truth, const std::vector<std::uint8_t> &observed_mask,
                      const Standardizer &standardizer, FeatureMode mode, std::size_t n_antennas,
                      std::size_t n_subcarriers, const TrainConfig &cfg)
{
    const auto t_begin = std::chrono::steady_clock::now();
    const std::size_t n = graph.n_nodes;
    if (observed_mask.size() != n || truth.size() != n)
        throw std::invalid_argument("train_gnn: map/mask/graph misaligned");

    std::vector<std::uint32_t> observed, unobserved;
    for (std::size_t i = 0; i < n; ++i)
        (observed_mask[i] != 0 ? observed : unobserved).push_back(static_cast<std::uint32_t>(i));
    if (observed.size() < 2)
        throw std::invalid_argument("train_gnn: need at least 2 observed nodes");

    // validation split: val_fraction of observed nodes, at least one of each
    std::vector<std::uint32_t> shuffled = observed;
    Rng split_rng(Rng::derive(cfg.seed, 0x5917ull));
    for (std::size_t i = shuffled.size(); i > 1; --i)
        std::swap(shuffled[i - 1], shuffled[split_rng.uniform_int(i)]);
    std::size_t n_val =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.val_fraction * observed.size())));
    if (n_val >= observed.size())
        n_val = observed.size() - 1;

    TrainResult result;
    result.val_nodes.assign(shuffled.begin(), shuffled.begin() + static_cast<long>(n_val));
    result.train_nodes.assign(shuffled.begin() + static_cast<long>(n_val), shuffled.end());
    std::sort(result.val_nodes.begin(), result.val_nodes.end());
    std::sort(result.train_nodes.begin(), result.train_nodes.end());

    GnnDims dims;
    dims.input_dim = static_cast<std::size_t>(x0_std.cols());
    dims.hidden_dim = cfg.hidden;
    dims.n_layers = cfg.n_layers;
    dims.filter_hidden = cfg.filter_hidden;
    dims.output_dim = 2 * n_antennas * n_subcarriers;
    dims.out_hidden = cfg.hidden;

    GnnParams params = init_params(dims, Rng::derive(cfg.seed, 0x1417ull));
    AdamWConfig opt_cfg = cfg.opt;
    opt_cfg.t_max = cfg.max_epochs;
    AdamWState opt_state = AdamWState::init(params);

    GnnParams best_params = params;
    result.best_val_nmse = std::numeric_limits<double>::infinity();
    result.best_epoch = 0;

    for (long epoch = 1; epoch <= cfg.max_epochs; ++epoch)
    {
        const auto t_epoch = std::chrono::steady_clock::now();

        ForwardOptions fwd_opts;
        fwd_opts.train_mode = true;
        fwd_opts.dropout_rate = cfg.dropout;
        fwd_opts.dropout_seed = Rng::derive(cfg.seed, 0xD0ull, static_cast<std::uint64_t>(epoch));
        fwd_opts.sample_k = cfg.sample_k;
        fwd_opts.sample_seed = Rng::derive(cfg.seed, 0x5Aull, static_cast<std::uint64_t>(epoch));

        const ForwardTrace trace = gnn_forward(graph, x0_std, params, fwd_opts);
        const CompositeLossResult loss =
            composite_loss(trace.y, graph, standardizer, mode, n_antennas, n_subcarriers, truth,
                           result.train_nodes, unobserved, priors_std, cfg.loss);

        if (!std::isfinite(loss.total()))
            throw std::runtime_error("train_gnn: loss diverged at epoch " + std::to_string(epoch) +
                                     " (l_r=" + std::to_string(loss.l_r) + ", l_s=" + std::to_string(loss.l_s) +
                                     ", l_p=" + std::to_string(loss.l_p) + ")");

        if (cfg.debug_dual_smoothness)
        {
            const double trace_form = loss_smoothness_trace(trace.y, graph, cfg.loss.lambda);
            if (std::abs(trace_form - loss.l_s) > 1e-9 * std::max(1.0, std::abs(loss.l_s)))
                throw std::runtime_error("train_gnn: smoothness edge-sum and trace forms disagree");
        }

        const Gradients grads = gnn_backward(graph, params, trace, loss.d_y);
        const double lr_used = cosine_lr(opt_cfg.lr, opt_state.step + 1, opt_cfg.t_max);
        adamw_step(params, grads, opt_state, opt_cfg);

        // validation NMSE from an eval-mode pass, physical space
        const MatRM y_eval = infer_inductive(graph, x0_std, params);
        std::vector<ChannelMatrix> val_pred(n);
        for (const std::uint32_t i : result.val_nodes)
        {
            const Eigen::VectorXd phys = standardizer.invert(y_eval.row(i).transpose());
            val_pred[i] = decode_features(phys, n_antennas, n_subcarriers, mode);
        }
        const double val_nmse = nmse(val_pred, truth, result.val_nodes);

        EpochLog log_row;
        log_row.epoch = epoch;
        log_row.l_r = loss.l_r;
        log_row.l_s = loss.l_s;
        log_row.l_p = loss.l_p;
        log_row.total = loss.total();
        log_row.val_nmse = val_nmse;
        log_row.lr = lr_used;
        log_row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_epoch).count();
        result.log.push_back(log_row);

        if (val_nmse < result.best_val_nmse)
        {
            result.best_val_nmse = val_nmse;
            result.best_epoch = epoch;
            best_params = params;
        }
        else if (epoch - result.best_epoch >= cfg.patience)
        {
            break;
        }
    }

    result.params = std::move(best_params);
    result.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
    return result;
}

void write_training_log(const std::vector<EpochLog> &log, const std::string &path)
{
    std::ofstream f(path);
    if (!f)
        throw std::runtime_error("write_training_log: cannot open '" + path + "'");
    f << "epoch,l_r,l_s,l_p,total,val_nmse,lr,seconds\n";
    char buf[512];
    for (const EpochLog &row : log)
    {
        std::snprintf(buf, sizeof(buf), "%ld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.6f\n", row.epoch, row.l_r,
                      row.l_s, row.l_p, row.total, row.val_nmse, row.lr, row.seconds);
        f << buf;
    }
}

} // namespace chanmap
