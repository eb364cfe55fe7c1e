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

#include "chanmap/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace chanmap
{

double loss_reconstruction(const std::vector<ChannelMatrix> &pred, const std::vector<ChannelMatrix> &truth,
                           const std::vector<std::uint32_t> &observed, double eps)
{
    if (observed.empty())
        throw std::invalid_argument("loss_reconstruction: empty observed set");
    double total = 0.0;
    for (const std::uint32_t i : observed)
        total += (pred[i].entries - truth[i].entries).squaredNorm() / (truth[i].entries.squaredNorm() + eps);
    return total / static_cast<double>(observed.size());
}

double loss_smoothness(const MatRM &y, const SpatialGraph &graph, double lambda)
{
    if (graph.edges.empty() || lambda == 0.0)
        return 0.0;
    return lambda / static_cast<double>(graph.edges.size()) * graph.laplacian_quadratic(y);
}

double loss_smoothness_trace(const MatRM &y, const SpatialGraph &graph, double lambda)
{
    if (graph.edges.empty() || lambda == 0.0)
        return 0.0;
    const Eigen::MatrixXd l = graph.dense_laplacian();
    const Eigen::MatrixXd yd = y;
    return lambda / static_cast<double>(graph.edges.size()) * (yd.transpose() * l * yd).trace();
}

double loss_prior(const MatRM &y, const MatRM &priors, const std::vector<std::uint32_t> &unobserved, double eta)
{
    if (unobserved.empty() || eta == 0.0)
        return 0.0;
    if (priors.rows() != y.rows() || priors.cols() != y.cols())
        throw std::invalid_argument("loss_prior: prior matrix shape mismatch");
    double total = 0.0;
    for (const std::uint32_t j : unobserved)
        total += (y.row(j) - priors.row(j)).squaredNorm();
    return eta * total / static_cast<double>(unobserved.size());
}

CompositeLossResult composite_loss(const MatRM &y_std, const SpatialGraph &graph, const Standardizer &standardizer,
                                   FeatureMode mode, std::size_t n_antennas, std::size_t n_subcarriers,
                                   const std::vector<ChannelMatrix> &truth,
                                   const std::vector<std::uint32_t> &observed_train,
                                   const std::vector<std::uint32_t> &unobserved, const MatRM &priors_std,
                                   const LossWeights &weights)
{
    if (observed_train.empty())
        throw std::invalid_argument("composite_loss: empty observed set");

    const Eigen::Index nl = static_cast<Eigen::Index>(n_antennas * n_subcarriers);
    CompositeLossResult out;
    out.d_y = MatRM::Zero(y_std.rows(), y_std.cols());

    // reconstruction, physical space
    const double r_scale = 1.0 / static_cast<double>(observed_train.size());
    for (const std::uint32_t i : observed_train)
    {
        const Eigen::VectorXd phys = standardizer.invert(y_std.row(i).transpose());
        const double denom = truth[i].entries.squaredNorm() + weights.eps;
        Eigen::VectorXd d_phys(2 * nl);

        if (mode == FeatureMode::Concat)
        {
            const Eigen::VectorXd target = encode_features(truth[i], FeatureMode::Concat);
            const Eigen::VectorXd err = phys - target;
            out.l_r += r_scale * err.squaredNorm() / denom;
            d_phys = (2.0 * r_scale / denom) * err;
        }
        else
        {
            const std::complex<double> *t = truth[i].entries.data();
            double sq = 0.0;
            for (Eigen::Index e = 0; e < nl; ++e)
            {
                const double mag = phys(e), ang = phys(nl + e);
                const double ca = std::cos(ang), sa = std::sin(ang);
                const double a = t[e].real(), b = t[e].imag();
                const double re = mag * ca - a, im = mag * sa - b;
                sq += re * re + im * im;
                d_phys(e) = (2.0 * r_scale / denom) * (mag - (a * ca + b * sa));
                d_phys(nl + e) = (2.0 * r_scale / denom) * mag * (a * sa - b * ca);
            }
            out.l_r += r_scale * sq / denom;
        }
        out.d_y.row(i) += d_phys.cwiseProduct(standardizer.std_dev).transpose();
    }

    // smoothness, standardized space
    if (weights.lambda > 0.0 && !graph.edges.empty())
    {
        const double s_scale = weights.lambda / static_cast<double>(graph.edges.size());
        double quad = 0.0;
        for (const SpatialGraph::Edge &e : graph.edges)
        {
            const Eigen::RowVectorXd diff = y_std.row(e.u) - y_std.row(e.v);
            quad += e.weight * diff.squaredNorm();
            out.d_y.row(e.u) += (2.0 * s_scale * e.weight) * diff;
            out.d_y.row(e.v) -= (2.0 * s_scale * e.weight) * diff;
        }
        out.l_s = s_scale * quad;
    }

    // prior consistency, standardized space
    if (weights.eta > 0.0 && !unobserved.empty())
    {
        const double p_scale = weights.eta / static_cast<double>(unobserved.size());
        for (const std::uint32_t j : unobserved)
        {
            const Eigen::RowVectorXd diff = y_std.row(j) - priors_std.row(j);
            out.l_p += p_scale * diff.squaredNorm();
            out.d_y.row(j) += (2.0 * p_scale) * diff;
        }
    }

    return out;
}

} // namespace chanmap
