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

#include "chanmap/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace chanmap
{

double nmse(const std::vector<ChannelMatrix> &pred, const std::vector<ChannelMatrix> &truth,
            const std::vector<std::uint32_t> &nodes)
{
    if (nodes.empty())
        throw std::invalid_argument("nmse: empty node set");
    if (pred.size() != truth.size())
        throw std::invalid_argument("nmse: prediction/truth maps misaligned");
    double err = 0.0, ref = 0.0;
    for (const std::uint32_t i : nodes)
    {
        err += (pred[i].entries - truth[i].entries).squaredNorm();
        ref += truth[i].entries.squaredNorm();
    }
    if (ref <= 0.0)
        throw std::invalid_argument("nmse: zero total truth power");
    return err / ref;
}

DispersionStats dispersion(const Cir &cir)
{
    if (cir.taps.empty())
        throw std::invalid_argument("dispersion: empty CIR");

    double p_sum = 0.0, tau_w = 0.0, phi_w = 0.0;
    for (const CirTap &tap : cir.taps)
    {
        const double p = std::norm(tap.amp);
        p_sum += p;
        tau_w += p * tap.delay_s;
        phi_w += p * tap.aoa_rad;
    }
    if (p_sum <= 0.0)
        throw std::invalid_argument("dispersion: CIR has zero power");

    DispersionStats stats;
    stats.node_index = cir.node_index;
    stats.tau_mean = tau_w / p_sum;
    stats.phi_mean = phi_w / p_sum;

    double tau_var = 0.0, phi_var = 0.0;
    for (const CirTap &tap : cir.taps)
    {
        const double p = std::norm(tap.amp);
        tau_var += p * (tap.delay_s - stats.tau_mean) * (tap.delay_s - stats.tau_mean);
        phi_var += p * (tap.aoa_rad - stats.phi_mean) * (tap.aoa_rad - stats.phi_mean);
    }
    stats.tau_rms = std::sqrt(tau_var / p_sum);
    stats.phi_rms = std::sqrt(phi_var / p_sum);
    return stats;
}

std::vector<double> delay_psd(const Cir &cir, double bin_width_s, double max_delay_s)
{
    if (bin_width_s <= 0.0)
        throw std::invalid_argument("delay_psd: bin width must be > 0");

    double span = max_delay_s;
    for (const CirTap &tap : cir.taps)
        span = std::max(span, tap.delay_s);

    const std::size_t n_bins = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(span / bin_width_s)) + 1);
    std::vector<double> bins(n_bins, 0.0);
    for (const CirTap &tap : cir.taps)
    {
        std::size_t idx = static_cast<std::size_t>(std::floor(tap.delay_s / bin_width_s));
        if (idx >= n_bins)
            idx = n_bins - 1;
        bins[idx] += std::norm(tap.amp);
    }
    return bins;
}

std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> values)
{
    if (values.empty())
        throw std::invalid_argument("empirical_cdf: empty input");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());

    std::vector<std::pair<double, double>> cdf;
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        const double prob = static_cast<double>(i + 1) / n;
        if (!cdf.empty() && cdf.back().first == values[i])
            cdf.back().second = prob; // collapse duplicates, keep the right limit
        else
            cdf.emplace_back(values[i], prob);
    }
    return cdf;
}

EvalReport evaluate_pipeline(const std::vector<ChannelMatrix> &truth, const std::vector<ChannelMatrix> &pred,
                             const std::vector<std::uint8_t> &observed_mask, const StageTimings &timings,
                             const std::vector<Cir> *cirs, const std::vector<ChannelMatrix> *idw_pred)
{
    const std::size_t n = truth.size();
    if (pred.size() != n || observed_mask.size() != n)
        throw std::invalid_argument("evaluate_pipeline: misaligned maps");

    std::vector<std::uint32_t> unobserved;
    for (std::size_t i = 0; i < n; ++i)
        if (observed_mask[i] == 0)
            unobserved.push_back(static_cast<std::uint32_t>(i));

    EvalReport report;
    report.timings = timings;
    report.nmse_gnn = unobserved.empty() ? 0.0 : nmse(pred, truth, unobserved);
    if (idw_pred != nullptr && !unobserved.empty())
        report.nmse_idw = nmse(*idw_pred, truth, unobserved);

    report.sq_err.resize(n);
    report.power_map.resize(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        report.sq_err[i] = (pred[i].entries - truth[i].entries).squaredNorm();
        report.power_map[i] = pred[i].frobenius_sq();
    }
    report.power_cdf = empirical_cdf(report.power_map);

    if (cirs != nullptr && cirs->size() == n)
    {
        report.ds_map.resize(n);
        report.as_map.resize(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            if ((*cirs)[i].taps.empty())
            {
                report.ds_map[i] = 0.0;
                report.as_map[i] = 0.0;
                continue;
            }
            const DispersionStats stats = dispersion((*cirs)[i]);
            report.ds_map[i] = stats.tau_rms;
            report.as_map[i] = stats.phi_rms;
        }
        report.ds_cdf = empirical_cdf(report.ds_map);
        report.as_cdf = empirical_cdf(report.as_map);
    }
    return report;
}

std::string report_to_json(const EvalReport &report)
{
    nlohmann::json j;
    j["nmse"] = report.nmse_gnn;
    if (report.nmse_idw)
        j["nmse_idw"] = *report.nmse_idw;
    j["timing"] = {{"model_stage_s", report.timings.model_stage_s},
                   {"data_stage_s", report.timings.data_stage_s},
                   {"refresh_s", report.timings.model_stage_s + report.timings.data_stage_s}};
    j["sq_err"] = report.sq_err;
    j["power_map"] = report.power_map;
    if (!report.ds_map.empty())
    {
        j["ds_map"] = report.ds_map;
        j["as_map"] = report.as_map;
    }
    auto cdf_json = [](const std::vector<std::pair<double, double>> &cdf)
    {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto &[v, p] : cdf)
            arr.push_back({v, p});
        return arr;
    };
    j["power_cdf"] = cdf_json(report.power_cdf);
    if (!report.ds_cdf.empty())
    {
        j["ds_cdf"] = cdf_json(report.ds_cdf);
        j["as_cdf"] = cdf_json(report.as_cdf);
    }
    return j.dump(2);
}

void write_report(const EvalReport &report, const std::string &path)
{
    std::ofstream f(path);
    if (!f)
        throw std::runtime_error("write_report: cannot open '" + path + "'");
    f << report_to_json(report) << "\n";
}

} // namespace chanmap
