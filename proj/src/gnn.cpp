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
// The edge-conditioned refinement is evaluated through basis matrices: with
// filter weights W2 in R^{D*D x B}, Theta(e) * z equals
//   (1/D) * (sum_b a_b(e) * M_b * z + M_bias * z),
// so per-node products Y_u = [M_0 z_u, ..., M_bias z_u] are one GEMM over all
// nodes and each edge only combines D*(B+1) precomputed values. The backward
// pass mirrors the same structure, which keeps the whole epoch in a handful
// of large matrix products.

#include "chanmap/gnn.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "chanmap/parallel.hpp"
#include "chanmap/rng.hpp"

namespace chanmap
{

namespace
{

constexpr double kLayerNormEps = 1e-5;

void fill_uniform(Eigen::MatrixXd &m, double bound, Rng &rng)
{
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            m(i, j) = rng.uniform(-bound, bound);
}

// out = a * b with rows of `a` processed in fixed parallel blocks
template <typename A, typename B> MatRM par_prod(const A &a, const B &b)
{
    MatRM out(a.rows(), b.cols());
    parallel_blocks(static_cast<std::size_t>(a.rows()),
                    [&](std::size_t s, std::size_t e, std::size_t)
                    {
                        out.middleRows(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(e - s)).noalias() =
                            a.middleRows(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(e - s)) * b;
                    });
    return out;
}

// a^T * b with a fixed-order block reduction (deterministic under threading)
template <typename A, typename B> Eigen::MatrixXd par_at_b(const A &a, const B &b)
{
    std::vector<Eigen::MatrixXd> partial(kParallelBlocks, Eigen::MatrixXd::Zero(a.cols(), b.cols()));
    parallel_blocks(static_cast<std::size_t>(a.rows()),
                    [&](std::size_t s, std::size_t e, std::size_t blk)
                    {
                        partial[blk].noalias() +=
                            a.middleRows(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(e - s)).transpose() *
                            b.middleRows(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(e - s));
                    });
    Eigen::MatrixXd out = std::move(partial[0]);
    for (std::size_t i = 1; i < partial.size(); ++i)
        out += partial[i];
    return out;
}

// basis matrices of the filter net, laid out for forward (M_b^T stacked) and
// backward (M_b stacked) products
struct BasisMats
{
    Eigen::MatrixXd fwd; // D x (B+1)*D, fwd(j, b*D+i) = M_b(i, j)
    Eigen::MatrixXd bwd; // D x (B+1)*D, bwd(i, b*D+r) = M_b(i, r)
};

BasisMats build_basis(const LayerParams &lp, std::size_t d, std::size_t b_cnt)
{
    const Eigen::Index di = static_cast<Eigen::Index>(d);
    BasisMats basis;
    basis.fwd.resize(di, static_cast<Eigen::Index>((b_cnt + 1) * d));
    basis.bwd.resize(di, static_cast<Eigen::Index>((b_cnt + 1) * d));
    for (std::size_t b = 0; b <= b_cnt; ++b)
    {
        for (Eigen::Index j = 0; j < di; ++j)
            for (Eigen::Index i = 0; i < di; ++i)
            {
                const double m_ij = (b < b_cnt) ? lp.filt_w2(i + di * j, static_cast<Eigen::Index>(b))
                                                : lp.filt_b2(i + di * j);
                basis.fwd(j, static_cast<Eigen::Index>(b * d) + i) = m_ij;
                basis.bwd(i, static_cast<Eigen::Index>(b * d) + j) = m_ij;
            }
    }
    return basis;
}

std::shared_ptr<const ActiveEdges> sample_edges(const ActiveEdges &full, std::size_t k, std::uint64_t seed,
                                                std::size_t layer)
{
    auto sampled = std::make_shared<ActiveEdges>();
    sampled->n_nodes = full.n_nodes;
    sampled->tgt_offsets.resize(full.n_nodes + 1, 0);

    std::vector<std::uint32_t> kept; // directed edge ids into `full`
    for (std::size_t node = 0; node < full.n_nodes; ++node)
    {
        const std::uint32_t begin = full.tgt_offsets[node];
        const std::uint32_t end = full.tgt_offsets[node + 1];
        const std::size_t deg = end - begin;
        sampled->tgt_offsets[node] = static_cast<std::uint32_t>(kept.size());
        if (deg <= k)
        {
            for (std::uint32_t e = begin; e < end; ++e)
                kept.push_back(e);
            continue;
        }
        std::vector<std::uint32_t> idx(deg);
        for (std::size_t i = 0; i < deg; ++i)
            idx[i] = begin + static_cast<std::uint32_t>(i);
        Rng rng(Rng::derive(seed, layer, node));
        for (std::size_t i = 0; i < k; ++i) // partial Fisher-Yates
        {
            const std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(deg - i));
            std::swap(idx[i], idx[j]);
        }
        idx.resize(k);
        std::sort(idx.begin(), idx.end());
        for (const std::uint32_t e : idx)
            kept.push_back(e);
    }
    sampled->tgt_offsets[full.n_nodes] = static_cast<std::uint32_t>(kept.size());

    const std::size_t n_e = kept.size();
    sampled->target.resize(n_e);
    sampled->source.resize(n_e);
    sampled->feat.resize(static_cast<Eigen::Index>(n_e), full.feat.cols());
    for (std::size_t i = 0; i < n_e; ++i)
    {
        sampled->target[i] = full.target[kept[i]];
        sampled->source[i] = full.source[kept[i]];
        sampled->feat.row(static_cast<Eigen::Index>(i)) = full.feat.row(kept[i]);
    }

    sampled->src_offsets.assign(full.n_nodes + 1, 0);
    for (const std::uint32_t s : sampled->source)
        sampled->src_offsets[s + 1]++;
    for (std::size_t i = 0; i < full.n_nodes; ++i)
        sampled->src_offsets[i + 1] += sampled->src_offsets[i];
    sampled->src_perm.resize(n_e);
    std::vector<std::uint32_t> cursor(sampled->src_offsets.begin(), sampled->src_offsets.end() - 1);
    for (std::uint32_t e = 0; e < n_e; ++e)
        sampled->src_perm[cursor[sampled->source[e]]++] = e;

    return sampled;
}

void layer_norm_rows(const MatRM &x, const Eigen::VectorXd &gain, const Eigen::VectorXd &bias, MatRM &xhat,
                     Eigen::VectorXd &inv_std, MatRM &out)
{
    const Eigen::Index d = x.cols();
    xhat.resize(x.rows(), d);
    out.resize(x.rows(), d);
    inv_std.resize(x.rows());
    parallel_blocks(static_cast<std::size_t>(x.rows()),
                    [&](std::size_t s, std::size_t e, std::size_t)
                    {
                        for (std::size_t r = s; r < e; ++r)
                        {
                            const Eigen::Index ri = static_cast<Eigen::Index>(r);
                            const double mu = x.row(ri).mean();
                            const double var = (x.row(ri).array() - mu).square().mean();
                            const double inv = 1.0 / std::sqrt(var + kLayerNormEps);
                            inv_std(ri) = inv;
                            xhat.row(ri) = (x.row(ri).array() - mu) * inv;
                            out.row(ri) = xhat.row(ri).cwiseProduct(gain.transpose()) + bias.transpose();
                        }
                    });
}

} // namespace

GnnParams init_params(const GnnDims &dims, std::uint64_t seed)
{
    if (dims.input_dim == 0 || dims.output_dim == 0 || dims.n_layers == 0)
        throw std::invalid_argument("init_params: dims not set");

    GnnParams p;
    p.dims = dims;
    p.layers.resize(dims.n_layers);
    std::uint64_t tensor_id = 0;
    auto init = [&](Eigen::MatrixXd &m, Eigen::Index rows, Eigen::Index cols, std::size_t fan_in)
    {
        m.resize(rows, cols);
        Rng rng(Rng::derive(seed, 0x717ull, tensor_id++));
        fill_uniform(m, 1.0 / std::sqrt(static_cast<double>(fan_in)), rng);
    };

    for (std::size_t l = 0; l < dims.n_layers; ++l)
    {
        LayerParams &lp = p.layers[l];
        const std::size_t d_in = dims.layer_in(l);
        const std::size_t d = dims.hidden_dim;
        init(lp.w_agg, static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(2 * d_in), 2 * d_in);
        lp.b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
        lp.ln_gain = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(d));
        lp.ln_bias = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
        init(lp.filt_w1, static_cast<Eigen::Index>(dims.filter_hidden), static_cast<Eigen::Index>(dims.edge_dim),
             dims.edge_dim);
        lp.filt_b1 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dims.filter_hidden));
        init(lp.filt_w2, static_cast<Eigen::Index>(d * d), static_cast<Eigen::Index>(dims.filter_hidden),
             dims.filter_hidden);
        lp.filt_b2 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d * d));
        init(lp.w_self, static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d), d);
    }

    init(p.out_w1, static_cast<Eigen::Index>(dims.out_hidden), static_cast<Eigen::Index>(dims.hidden_dim),
         dims.hidden_dim);
    p.out_b1 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dims.out_hidden));
    init(p.out_w2, static_cast<Eigen::Index>(dims.output_dim), static_cast<Eigen::Index>(dims.out_hidden),
         dims.out_hidden);
    p.out_b2 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dims.output_dim));
    return p;
}

Gradients zeros_like(const GnnParams &params)
{
    Gradients g;
    g.dims = params.dims;
    g.layers.resize(params.layers.size());
    for (std::size_t l = 0; l < params.layers.size(); ++l)
    {
        const LayerParams &lp = params.layers[l];
        LayerParams &gl = g.layers[l];
        gl.w_agg = Eigen::MatrixXd::Zero(lp.w_agg.rows(), lp.w_agg.cols());
        gl.b = Eigen::VectorXd::Zero(lp.b.size());
        gl.ln_gain = Eigen::VectorXd::Zero(lp.ln_gain.size());
        gl.ln_bias = Eigen::VectorXd::Zero(lp.ln_bias.size());
        gl.filt_w1 = Eigen::MatrixXd::Zero(lp.filt_w1.rows(), lp.filt_w1.cols());
        gl.filt_b1 = Eigen::VectorXd::Zero(lp.filt_b1.size());
        gl.filt_w2 = Eigen::MatrixXd::Zero(lp.filt_w2.rows(), lp.filt_w2.cols());
        gl.filt_b2 = Eigen::VectorXd::Zero(lp.filt_b2.size());
        gl.w_self = Eigen::MatrixXd::Zero(lp.w_self.rows(), lp.w_self.cols());
    }
    g.out_w1 = Eigen::MatrixXd::Zero(params.out_w1.rows(), params.out_w1.cols());
    g.out_b1 = Eigen::VectorXd::Zero(params.out_b1.size());
    g.out_w2 = Eigen::MatrixXd::Zero(params.out_w2.rows(), params.out_w2.cols());
    g.out_b2 = Eigen::VectorXd::Zero(params.out_b2.size());
    return g;
}

std::vector<TensorRef> tensor_views(GnnParams &params)
{
    std::vector<TensorRef> out;
    auto add = [&](const std::string &name, Eigen::MatrixXd &m)
    { out.push_back({name, m.data(), static_cast<std::size_t>(m.size())}); };
    auto addv = [&](const std::string &name, Eigen::VectorXd &v)
    { out.push_back({name, v.data(), static_cast<std::size_t>(v.size())}); };

    for (std::size_t l = 0; l < params.layers.size(); ++l)
    {
        const std::string p = "layer" + std::to_string(l) + ".";
        LayerParams &lp = params.layers[l];
        add(p + "w_agg", lp.w_agg);
        addv(p + "b", lp.b);
        addv(p + "ln_gain", lp.ln_gain);
        addv(p + "ln_bias", lp.ln_bias);
        add(p + "filt_w1", lp.filt_w1);
        addv(p + "filt_b1", lp.filt_b1);
        add(p + "filt_w2", lp.filt_w2);
        addv(p + "filt_b2", lp.filt_b2);
        add(p + "w_self", lp.w_self);
    }
    add("out_w1", params.out_w1);
    addv("out_b1", params.out_b1);
    add("out_w2", params.out_w2);
    addv("out_b2", params.out_b2);
    return out;
}

std::size_t parameter_count(const GnnParams &params)
{
    std::size_t n = 0;
    for (const TensorRef &t : tensor_views(const_cast<GnnParams &>(params)))
        n += t.size;
    return n;
}

ForwardTrace gnn_forward(const SpatialGraph &graph, const MatRM &x0, const GnnParams &params,
                         const ForwardOptions &opts)
{
    const std::size_t n = graph.n_nodes;
    if (static_cast<std::size_t>(x0.rows()) != n)
        throw std::invalid_argument("gnn_forward: one feature row per node required");
    if (static_cast<std::size_t>(x0.cols()) != params.dims.input_dim)
        throw std::invalid_argument("gnn_forward: feature width does not match input_dim");
    if (!x0.allFinite())
        throw std::invalid_argument("gnn_forward: non-finite input features");

    const std::size_t d = params.dims.hidden_dim;
    const std::size_t b_cnt = params.dims.filter_hidden;
    const double inv_d = 1.0 / static_cast<double>(d);

    ForwardTrace trace;
    trace.train_mode = opts.train_mode;
    trace.layers.resize(params.dims.n_layers);

    MatRM z = x0;
    for (std::size_t l = 0; l < params.dims.n_layers; ++l)
    {
        const LayerParams &lp = params.layers[l];
        LayerTrace &lt = trace.layers[l];
        const std::size_t d_in = params.dims.layer_in(l);

        lt.edges = (opts.sample_k > 0)
                       ? sample_edges(graph.full, opts.sample_k, Rng::derive(opts.sample_seed, 0x5A3ull), l)
                       : std::shared_ptr<const ActiveEdges>(&graph.full, [](const ActiveEdges *) {});
        const ActiveEdges &edges = *lt.edges;

        lt.z_prev = std::move(z);

        // mean over the (sampled) neighborhood; isolated nodes fall back to self
        lt.m.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d_in));
        parallel_blocks(n,
                        [&](std::size_t s, std::size_t e, std::size_t)
                        {
                            for (std::size_t k = s; k < e; ++k)
                            {
                                const std::uint32_t begin = edges.tgt_offsets[k], end = edges.tgt_offsets[k + 1];
                                const Eigen::Index ki = static_cast<Eigen::Index>(k);
                                if (begin == end)
                                {
                                    lt.m.row(ki) = lt.z_prev.row(ki);
                                    continue;
                                }
                                lt.m.row(ki).setZero();
                                for (std::uint32_t e2 = begin; e2 < end; ++e2)
                                    lt.m.row(ki) += lt.z_prev.row(edges.source[e2]);
                                lt.m.row(ki) /= static_cast<double>(end - begin);
                            }
                        });

        MatRM concat(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(2 * d_in));
        concat.leftCols(static_cast<Eigen::Index>(d_in)) = lt.z_prev;
        concat.rightCols(static_cast<Eigen::Index>(d_in)) = lt.m;

        lt.h1 = par_prod(concat, lp.w_agg.transpose());
        lt.h1.rowwise() += lp.b.transpose();
        lt.h1 = lt.h1.cwiseMax(0.0);

        MatRM ln_out;
        layer_norm_rows(lt.h1, lp.ln_gain, lp.ln_bias, lt.xhat, lt.inv_std, ln_out);

        if (opts.train_mode && opts.dropout_rate > 0.0)
        {
            lt.mask.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
            const double scale = 1.0 / (1.0 - opts.dropout_rate);
            parallel_blocks(n,
                            [&](std::size_t s, std::size_t e, std::size_t)
                            {
                                for (std::size_t k = s; k < e; ++k)
                                {
                                    Rng rng(Rng::derive(opts.dropout_seed, l, k));
                                    for (std::size_t j = 0; j < d; ++j)
                                        lt.mask(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) =
                                            rng.uniform() >= opts.dropout_rate ? scale : 0.0;
                                }
                            });
            lt.ztilde = ln_out.cwiseProduct(lt.mask);
        }
        else
        {
            lt.ztilde = std::move(ln_out);
        }

        // edge-conditioned refinement
        lt.filt_hidden = par_prod(edges.feat, lp.filt_w1.transpose());
        lt.filt_hidden.rowwise() += lp.filt_b1.transpose();
        lt.filt_hidden = lt.filt_hidden.cwiseMax(0.0);

        const BasisMats basis = build_basis(lp, d, b_cnt);
        lt.y_basis = par_prod(lt.ztilde, basis.fwd);

        MatRM pre2 = par_prod(lt.ztilde, lp.w_self.transpose());
        parallel_blocks(n,
                        [&](std::size_t s, std::size_t e, std::size_t)
                        {
                            for (std::size_t k = s; k < e; ++k)
                            {
                                const Eigen::Index ki = static_cast<Eigen::Index>(k);
                                for (std::uint32_t e2 = edges.tgt_offsets[k]; e2 < edges.tgt_offsets[k + 1]; ++e2)
                                {
                                    const Eigen::Index u = edges.source[e2];
                                    const Eigen::Index ei = static_cast<Eigen::Index>(e2);
                                    for (std::size_t b = 0; b <= b_cnt; ++b)
                                    {
                                        const double coef =
                                            (b < b_cnt ? lt.filt_hidden(ei, static_cast<Eigen::Index>(b)) : 1.0) *
                                            inv_d;
                                        if (coef != 0.0)
                                            pre2.row(ki) += coef * lt.y_basis.row(u).segment(
                                                                       static_cast<Eigen::Index>(b * d),
                                                                       static_cast<Eigen::Index>(d));
                                    }
                                }
                            }
                        });

        lt.act2 = pre2.cwiseMax(0.0);

        // residual; a fixed truncation/zero-pad aligns mismatched widths
        z = lt.act2;
        if (d_in == d)
            z += lt.z_prev;
        else if (d_in > d)
            z += lt.z_prev.leftCols(static_cast<Eigen::Index>(d));
        else
            z.leftCols(static_cast<Eigen::Index>(d_in)) += lt.z_prev;
    }

    trace.z_final = z;
    trace.o1 = par_prod(trace.z_final, params.out_w1.transpose());
    trace.o1.rowwise() += params.out_b1.transpose();
    trace.o1 = trace.o1.cwiseMax(0.0);
    trace.y = par_prod(trace.o1, params.out_w2.transpose());
    trace.y.rowwise() += params.out_b2.transpose();
    return trace;
}

Gradients gnn_backward(const SpatialGraph &graph, const GnnParams &params, const ForwardTrace &trace,
                       const MatRM &d_y)
{
    const std::size_t n = graph.n_nodes;
    if (trace.layers.size() != params.dims.n_layers)
        throw std::invalid_argument("gnn_backward: trace does not match parameter stack");
    if (d_y.rows() != trace.y.rows() || d_y.cols() != trace.y.cols())
        throw std::invalid_argument("gnn_backward: output gradient shape mismatch");

    const std::size_t d = params.dims.hidden_dim;
    const std::size_t b_cnt = params.dims.filter_hidden;
    const double inv_d = 1.0 / static_cast<double>(d);

    Gradients grads = zeros_like(params);

    // prediction head
    grads.out_w2 = par_at_b(d_y, trace.o1);
    grads.out_b2 = d_y.colwise().sum().transpose();
    MatRM d_o1 = par_prod(d_y, params.out_w2);
    d_o1 = d_o1.cwiseProduct((trace.o1.array() > 0.0).cast<double>().matrix());
    grads.out_w1 = par_at_b(d_o1, trace.z_final);
    grads.out_b1 = d_o1.colwise().sum().transpose();
    MatRM d_z = par_prod(d_o1, params.out_w1);

    for (std::size_t l = params.dims.n_layers; l-- > 0;)
    {
        const LayerParams &lp = params.layers[l];
        const LayerTrace &lt = trace.layers[l];
        LayerParams &gl = grads.layers[l];
        const ActiveEdges &edges = *lt.edges;
        const std::size_t d_in = params.dims.layer_in(l);

        MatRM d_pre2 = d_z.cwiseProduct((lt.act2.array() > 0.0).cast<double>().matrix());

        gl.w_self = par_at_b(d_pre2, lt.ztilde);
        MatRM d_ztilde = par_prod(d_pre2, lp.w_self);

        const BasisMats basis = build_basis(lp, d, b_cnt);
        const MatRM y_hat = par_prod(d_pre2, basis.bwd);

        MatRM q = MatRM::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>((b_cnt + 1) * d));
        MatRM d_a = MatRM::Zero(static_cast<Eigen::Index>(edges.n_edges()), static_cast<Eigen::Index>(b_cnt));

        parallel_blocks(n,
                        [&](std::size_t s, std::size_t e, std::size_t)
                        {
                            for (std::size_t u = s; u < e; ++u)
                            {
                                const Eigen::Index ui = static_cast<Eigen::Index>(u);
                                for (std::uint32_t p = edges.src_offsets[u]; p < edges.src_offsets[u + 1]; ++p)
                                {
                                    const std::uint32_t e2 = edges.src_perm[p];
                                    const Eigen::Index k = edges.target[e2];
                                    const Eigen::Index ei = static_cast<Eigen::Index>(e2);
                                    for (std::size_t b = 0; b <= b_cnt; ++b)
                                    {
                                        const Eigen::Index seg = static_cast<Eigen::Index>(b * d);
                                        const double coef =
                                            (b < b_cnt ? lt.filt_hidden(ei, static_cast<Eigen::Index>(b)) : 1.0) *
                                            inv_d;
                                        if (coef != 0.0)
                                            d_ztilde.row(ui) +=
                                                coef * y_hat.row(k).segment(seg, static_cast<Eigen::Index>(d));
                                        if (b < b_cnt)
                                            d_a(ei, static_cast<Eigen::Index>(b)) =
                                                inv_d * lt.y_basis.row(ui)
                                                            .segment(seg, static_cast<Eigen::Index>(d))
                                                            .dot(d_pre2.row(k));
                                        q.row(ui).segment(seg, static_cast<Eigen::Index>(d)) +=
                                            (b < b_cnt ? lt.filt_hidden(ei, static_cast<Eigen::Index>(b)) : 1.0) *
                                            d_pre2.row(k);
                                    }
                                }
                            }
                        });

        // filter-net weights from the per-source aggregates
        const Eigen::MatrixXd d_m_cat = par_at_b(q, lt.ztilde) * inv_d; // (B+1)*D x D
        const Eigen::Index di = static_cast<Eigen::Index>(d);
        for (std::size_t b = 0; b <= b_cnt; ++b)
            for (Eigen::Index j = 0; j < di; ++j)
                for (Eigen::Index i = 0; i < di; ++i)
                {
                    const double g = d_m_cat(static_cast<Eigen::Index>(b * d) + i, j);
                    if (b < b_cnt)
                        gl.filt_w2(i + di * j, static_cast<Eigen::Index>(b)) = g;
                    else
                        gl.filt_b2(i + di * j) = g;
                }

        MatRM d_a_pre = d_a.cwiseProduct((lt.filt_hidden.array() > 0.0).cast<double>().matrix());
        gl.filt_w1 = par_at_b(d_a_pre, edges.feat);
        gl.filt_b1 = d_a_pre.colwise().sum().transpose();

        // dropout, LayerNorm, SAGE affine
        MatRM d_ln = lt.mask.size() > 0 ? d_ztilde.cwiseProduct(lt.mask) : std::move(d_ztilde);

        gl.ln_gain = (d_ln.cwiseProduct(lt.xhat)).colwise().sum().transpose();
        gl.ln_bias = d_ln.colwise().sum().transpose();

        MatRM d_h1(static_cast<Eigen::Index>(n), di);
        parallel_blocks(n,
                        [&](std::size_t s, std::size_t e, std::size_t)
                        {
                            for (std::size_t r = s; r < e; ++r)
                            {
                                const Eigen::Index ri = static_cast<Eigen::Index>(r);
                                const Eigen::RowVectorXd dxhat =
                                    d_ln.row(ri).cwiseProduct(lp.ln_gain.transpose());
                                const double mean_dx = dxhat.mean();
                                const double mean_dx_xhat = dxhat.cwiseProduct(lt.xhat.row(ri)).mean();
                                d_h1.row(ri) = (dxhat.array() - mean_dx - lt.xhat.row(ri).array() * mean_dx_xhat) *
                                               lt.inv_std(ri);
                            }
                        });

        MatRM d_pre1 = d_h1.cwiseProduct((lt.h1.array() > 0.0).cast<double>().matrix());
        gl.w_agg.leftCols(static_cast<Eigen::Index>(d_in)) = par_at_b(d_pre1, lt.z_prev);
        gl.w_agg.rightCols(static_cast<Eigen::Index>(d_in)) = par_at_b(d_pre1, lt.m);
        gl.b = d_pre1.colwise().sum().transpose();

        MatRM d_concat = par_prod(d_pre1, lp.w_agg);
        MatRM d_z_prev = d_concat.leftCols(static_cast<Eigen::Index>(d_in));
        const auto d_m = d_concat.rightCols(static_cast<Eigen::Index>(d_in));

        // mean-aggregation scatter (by source) and isolated-node fallback
        parallel_blocks(n,
                        [&](std::size_t s, std::size_t e, std::size_t)
                        {
                            for (std::size_t u = s; u < e; ++u)
                            {
                                const Eigen::Index ui = static_cast<Eigen::Index>(u);
                                if (edges.degree(u) == 0)
                                    d_z_prev.row(ui) += d_m.row(ui);
                                for (std::uint32_t p = edges.src_offsets[u]; p < edges.src_offsets[u + 1]; ++p)
                                {
                                    const std::uint32_t k = edges.target[edges.src_perm[p]];
                                    d_z_prev.row(ui) += d_m.row(k) / static_cast<double>(edges.degree(k));
                                }
                            }
                        });

        // residual adjoint
        if (d_in == d)
            d_z_prev += d_z;
        else if (d_in > d)
            d_z_prev.leftCols(static_cast<Eigen::Index>(d)) += d_z;
        else
            d_z_prev += d_z.leftCols(static_cast<Eigen::Index>(d_in));

        d_z = std::move(d_z_prev);
    }

    return grads;
}

MatRM infer_inductive(const SpatialGraph &graph, const MatRM &x0, const GnnParams &params)
{
    ForwardOptions opts;
    opts.train_mode = false;
    return gnn_forward(graph, x0, params, opts).y;
}

std::vector<ChannelMatrix> predictions_to_matrices(const MatRM &y, const Standardizer &standardizer,
                                                   std::size_t n_antennas, std::size_t n_subcarriers,
                                                   FeatureMode mode)
{
    std::vector<ChannelMatrix> out(static_cast<std::size_t>(y.rows()));
    for (Eigen::Index i = 0; i < y.rows(); ++i)
    {
        const Eigen::VectorXd phys = standardizer.invert(y.row(i).transpose());
        out[static_cast<std::size_t>(i)] = decode_features(phys, n_antennas, n_subcarriers, mode);
        out[static_cast<std::size_t>(i)].node_index = static_cast<std::size_t>(i);
    }
    return out;
}

namespace
{
template <typename T> void put(std::ofstream &f, const T &v)
{
    f.write(reinterpret_cast<const char *>(&v), sizeof(T));
}
template <typename T> T take(std::ifstream &f)
{
    T v{};
    f.read(reinterpret_cast<char *>(&v), sizeof(T));
    return v;
}

void put_vec(std::ofstream &f, const double *data, std::size_t size)
{
    put<std::uint64_t>(f, size);
    f.write(reinterpret_cast<const char *>(data), static_cast<std::streamsize>(size * sizeof(double)));
}

std::vector<double> take_vec(std::ifstream &f)
{
    std::vector<double> v(take<std::uint64_t>(f));
    f.read(reinterpret_cast<char *>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
    return v;
}
} // namespace

void write_checkpoint(const Checkpoint &ckpt, const std::string &path)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("write_checkpoint: cannot open '" + path + "'");
    f.write("CKPT", 4);
    put<std::uint32_t>(f, 1);
    const GnnDims &d = ckpt.params.dims;
    for (const std::size_t v : {d.input_dim, d.hidden_dim, d.n_layers, d.edge_dim, d.filter_hidden, d.output_dim,
                                d.out_hidden})
        put<std::uint64_t>(f, v);
    put<std::uint64_t>(f, ckpt.n_antennas);
    put<std::uint64_t>(f, ckpt.n_subcarriers);
    put<std::uint32_t>(f, ckpt.mode == FeatureMode::Concat ? 0u : 1u);
    put_vec(f, ckpt.standardizer.mean.data(), static_cast<std::size_t>(ckpt.standardizer.mean.size()));
    put_vec(f, ckpt.standardizer.std_dev.data(), static_cast<std::size_t>(ckpt.standardizer.std_dev.size()));

    auto &mutable_params = const_cast<GnnParams &>(ckpt.params);
    for (const TensorRef &t : tensor_views(mutable_params))
        put_vec(f, t.data, t.size);
}

Checkpoint read_checkpoint(const std::string &path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("read_checkpoint: cannot open '" + path + "'");
    char magic[4];
    f.read(magic, 4);
    if (std::string(magic, 4) != "CKPT")
        throw std::runtime_error("read_checkpoint: bad magic in '" + path + "'");
    if (take<std::uint32_t>(f) != 1)
        throw std::runtime_error("read_checkpoint: unsupported version");

    GnnDims dims;
    dims.input_dim = take<std::uint64_t>(f);
    dims.hidden_dim = take<std::uint64_t>(f);
    dims.n_layers = take<std::uint64_t>(f);
    dims.edge_dim = take<std::uint64_t>(f);
    dims.filter_hidden = take<std::uint64_t>(f);
    dims.output_dim = take<std::uint64_t>(f);
    dims.out_hidden = take<std::uint64_t>(f);

    Checkpoint ckpt;
    ckpt.n_antennas = take<std::uint64_t>(f);
    ckpt.n_subcarriers = take<std::uint64_t>(f);
    ckpt.mode = take<std::uint32_t>(f) == 0 ? FeatureMode::Concat : FeatureMode::Polar;

    const std::vector<double> mean = take_vec(f);
    const std::vector<double> stdd = take_vec(f);
    ckpt.standardizer.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
    ckpt.standardizer.std_dev =
        Eigen::Map<const Eigen::VectorXd>(stdd.data(), static_cast<Eigen::Index>(stdd.size()));

    ckpt.params = init_params(dims, 0);
    for (const TensorRef &t : tensor_views(ckpt.params))
    {
        const std::vector<double> v = take_vec(f);
        if (v.size() != t.size)
            throw std::runtime_error("read_checkpoint: tensor size mismatch for " + t.name);
        std::memcpy(t.data, v.data(), v.size() * sizeof(double));
    }
    if (!f)
        throw std::runtime_error("read_checkpoint: truncated file '" + path + "'");
    return ckpt;
}

std::uint64_t params_hash(const GnnParams &params)
{
    std::uint64_t h = 0xcbf29ce484222325ull; // FNV-1a
    auto feed = [&h](const void *data, std::size_t bytes)
    {
        const auto *p = static_cast<const unsigned char *>(data);
        for (std::size_t i = 0; i < bytes; ++i)
        {
            h ^= p[i];
            h *= 0x100000001b3ull;
        }
    };
    for (const std::size_t v : {params.dims.input_dim, params.dims.hidden_dim, params.dims.n_layers,
                                params.dims.output_dim})
    {
        const std::uint64_t u = v;
        feed(&u, sizeof(u));
    }
    auto &mutable_params = const_cast<GnnParams &>(params);
    for (const TensorRef &t : tensor_views(mutable_params))
        feed(t.data, t.size * sizeof(double));
    return h;
}

} // namespace chanmap
