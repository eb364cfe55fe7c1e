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

#include "chanmap/features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chanmap
{

FeatureMode feature_mode_from_string(const std::string &s)
{
    if (s == "concat")
        return FeatureMode::Concat;
    if (s == "polar")
        return FeatureMode::Polar;
    throw std::invalid_argument("unknown feature mode '" + s + "'");
}

std::string to_string(FeatureMode mode) { return mode == FeatureMode::Concat ? "concat" : "polar"; }

Eigen::VectorXd encode_features(const ChannelMatrix &h, FeatureMode mode)
{
    const Eigen::Index nl = h.entries.size();
    Eigen::VectorXd x(2 * nl);
    const std::complex<double> *data = h.entries.data(); // column-major vec
    if (mode == FeatureMode::Concat)
    {
        for (Eigen::Index i = 0; i < nl; ++i)
        {
            x(i) = data[i].real();
            x(nl + i) = data[i].imag();
        }
    }
    else
    {
        for (Eigen::Index i = 0; i < nl; ++i)
        {
            x(i) = std::abs(data[i]);
            x(nl + i) = std::arg(data[i]); // in (-pi, pi]
        }
    }
    return x;
}

ChannelMatrix decode_features(const Eigen::VectorXd &x, std::size_t n_antennas, std::size_t n_subcarriers,
                              FeatureMode mode)
{
    const Eigen::Index nl = static_cast<Eigen::Index>(n_antennas * n_subcarriers);
    if (x.size() != 2 * nl)
        throw std::invalid_argument("decode_features: vector length does not match 2*N*L");

    ChannelMatrix h;
    h.entries.resize(static_cast<Eigen::Index>(n_antennas), static_cast<Eigen::Index>(n_subcarriers));
    std::complex<double> *data = h.entries.data();
    if (mode == FeatureMode::Concat)
    {
        for (Eigen::Index i = 0; i < nl; ++i)
            data[i] = {x(i), x(nl + i)};
    }
    else
    {
        for (Eigen::Index i = 0; i < nl; ++i)
            data[i] = std::polar(x(i), x(nl + i));
    }
    return h;
}

Eigen::VectorXd embed_polar_phase(const Eigen::VectorXd &polar_2nl)
{
    const Eigen::Index nl = polar_2nl.size() / 2;
    Eigen::VectorXd out(3 * nl);
    out.head(nl) = polar_2nl.head(nl);
    for (Eigen::Index i = 0; i < nl; ++i)
    {
        out(nl + i) = std::sin(polar_2nl(nl + i));
        out(2 * nl + i) = std::cos(polar_2nl(nl + i));
    }
    return out;
}

Standardizer Standardizer::fit(const std::vector<Eigen::VectorXd> &observed)
{
    if (observed.size() < 2)
        throw std::invalid_argument("standardizer: need at least 2 observed nodes");
    const Eigen::Index dim = observed.front().size();

    Standardizer s;
    s.mean = Eigen::VectorXd::Zero(dim);
    for (const Eigen::VectorXd &x : observed)
    {
        if (x.size() != dim)
            throw std::invalid_argument("standardizer: inconsistent feature lengths");
        s.mean += x;
    }
    s.mean /= static_cast<double>(observed.size());

    Eigen::VectorXd var = Eigen::VectorXd::Zero(dim);
    for (const Eigen::VectorXd &x : observed)
        var += (x - s.mean).cwiseAbs2();
    var /= static_cast<double>(observed.size());

    s.std_dev = var.cwiseSqrt().cwiseMax(1e-8);
    return s;
}

Eigen::VectorXd Standardizer::apply(const Eigen::VectorXd &x) const
{
    return (x - mean).cwiseQuotient(std_dev);
}

Eigen::VectorXd Standardizer::invert(const Eigen::VectorXd &x) const
{
    return x.cwiseProduct(std_dev) + mean;
}

ChannelMatrix idw_prior(const std::pair<double, double> &target,
                        const std::vector<std::pair<double, double>> &observed_coords,
                        const std::vector<const ChannelMatrix *> &observed_h, double power)
{
    if (observed_coords.empty() || observed_coords.size() != observed_h.size())
        throw std::invalid_argument("idw_prior: empty or inconsistent observed set");
    if (power <= 0.0)
        throw std::invalid_argument("idw_prior: power parameter must be > 0");

    double weight_sum = 0.0;
    std::vector<double> weights(observed_coords.size());
    for (std::size_t i = 0; i < observed_coords.size(); ++i)
    {
        const double dx = target.first - observed_coords[i].first;
        const double dy = target.second - observed_coords[i].second;
        const double d = std::sqrt(dx * dx + dy * dy);
        if (d < 1e-9)
        {
            ChannelMatrix out = *observed_h[i];
            return out;
        }
        weights[i] = std::pow(d, -power);
        weight_sum += weights[i];
    }

    ChannelMatrix out;
    out.entries = Eigen::MatrixXcd::Zero(observed_h.front()->entries.rows(), observed_h.front()->entries.cols());
    for (std::size_t i = 0; i < observed_h.size(); ++i)
        out.entries += (weights[i] / weight_sum) * observed_h[i]->entries;
    return out;
}

EmpiricalDistribution EmpiricalDistribution::from_matrix(const ChannelMatrix &h)
{
    std::vector<double> mags(static_cast<std::size_t>(h.entries.size()));
    const std::complex<double> *data = h.entries.data();
    for (std::size_t i = 0; i < mags.size(); ++i)
        mags[i] = std::abs(data[i]);
    return from_samples(std::move(mags));
}

EmpiricalDistribution EmpiricalDistribution::from_samples(std::vector<double> values)
{
    std::sort(values.begin(), values.end());
    return {std::move(values)};
}

double wasserstein_1d(const EmpiricalDistribution &u, const EmpiricalDistribution &v)
{
    const std::vector<double> &a = u.samples;
    const std::vector<double> &b = v.samples;
    if (a.empty() || b.empty())
        throw std::invalid_argument("wasserstein_1d: empty distribution");

    if (a.size() == b.size())
    {
        // equal sample counts: mean absolute difference of sorted samples
        double sum = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            sum += std::abs(a[i] - b[i]);
        return sum / static_cast<double>(a.size());
    }

    // integral of |F_u - F_v| between consecutive merged breakpoints
    const double step_a = 1.0 / static_cast<double>(a.size());
    const double step_b = 1.0 / static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double f_a = 0.0, f_b = 0.0;
    double z_prev = std::min(a.front(), b.front());
    double total = 0.0;
    while (i < a.size() || j < b.size())
    {
        double z;
        if (i < a.size() && (j >= b.size() || a[i] <= b[j]))
            z = a[i];
        else
            z = b[j];
        total += std::abs(f_a - f_b) * (z - z_prev);
        while (i < a.size() && a[i] == z)
        {
            f_a += step_a;
            ++i;
        }
        while (j < b.size() && b[j] == z)
        {
            f_b += step_b;
            ++j;
        }
        z_prev = z;
    }
    return total;
}

} // namespace chanmap
