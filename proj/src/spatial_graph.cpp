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

#include "chanmap/spatial_graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <stdexcept>

#include "chanmap/parallel.hpp"
#include "chanmap/tracer.hpp"

namespace chanmap
{

GraphMetric graph_metric_from_string(const std::string &s)
{
    if (s == "wasserstein")
        return GraphMetric::Wasserstein;
    if (s == "euclidean")
        return GraphMetric::Euclidean;
    throw std::invalid_argument("unknown graph metric '" + s + "'");
}

std::string to_string(GraphMetric metric)
{
    return metric == GraphMetric::Wasserstein ? "wasserstein" : "euclidean";
}

int los_indicator(const Scene &scene, const Vec3 &u, const Vec3 &v)
{
    return (tx_visible(scene, u) && tx_visible(scene, v)) ? 1 : 0;
}

LosFn make_scene_los_fn(const Scene &scene, const std::vector<std::pair<double, double>> &coords, double rx_height)
{
    auto visible = std::make_shared<std::vector<char>>(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i)
        (*visible)[i] = tx_visible(scene, {coords[i].first, coords[i].second, rx_height}) ? 1 : 0;
    return [visible](std::size_t u, std::size_t v)
    { return ((*visible)[u] && (*visible)[v]) ? 1.0 : 0.0; };
}

namespace
{

double euclid(const std::pair<double, double> &a, const std::pair<double, double> &b)
{
    const double dx = a.first - b.first;
    const double dy = a.second - b.second;
    return std::sqrt(dx * dx + dy * dy);
}

// Directed edge arrays from the undirected edge list.
ActiveEdges build_active_edges(std::size_t n_nodes, const std::vector<SpatialGraph::Edge> &edges,
                               const std::vector<std::pair<double, double>> &coords)
{
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> adj(n_nodes); // (neighbor, edge id)
    for (std::uint32_t e = 0; e < edges.size(); ++e)
    {
        adj[edges[e].u].emplace_back(edges[e].v, e);
        adj[edges[e].v].emplace_back(edges[e].u, e);
    }
    for (auto &list : adj)
        std::sort(list.begin(), list.end());

    ActiveEdges out;
    out.n_nodes = n_nodes;
    std::size_t n_dir = 0;
    for (const auto &list : adj)
        n_dir += list.size();

    out.target.reserve(n_dir);
    out.source.reserve(n_dir);
    out.tgt_offsets.resize(n_nodes + 1, 0);
    out.feat.resize(static_cast<Eigen::Index>(n_dir), kEdgeFeatureDim);

    std::size_t pos = 0;
    for (std::size_t k = 0; k < n_nodes; ++k)
    {
        out.tgt_offsets[k] = static_cast<std::uint32_t>(pos);
        for (const auto &[nbr, eid] : adj[k])
        {
            out.target.push_back(static_cast<std::uint32_t>(k));
            out.source.push_back(nbr);
            const double dx = coords[k].first - coords[nbr].first;
            const double dy = coords[k].second - coords[nbr].second;
            out.feat(static_cast<Eigen::Index>(pos), 0) = dx;
            out.feat(static_cast<Eigen::Index>(pos), 1) = dy;
            out.feat(static_cast<Eigen::Index>(pos), 2) = std::sqrt(dx * dx + dy * dy);
            out.feat(static_cast<Eigen::Index>(pos), 3) = edges[eid].w_dist;
            out.feat(static_cast<Eigen::Index>(pos), 4) = edges[eid].los;
            ++pos;
        }
    }
    out.tgt_offsets[n_nodes] = static_cast<std::uint32_t>(pos);

    // by-source grouping (counting sort keeps target order within a group)
    out.src_offsets.assign(n_nodes + 1, 0);
    for (const std::uint32_t s : out.source)
        out.src_offsets[s + 1]++;
    for (std::size_t k = 0; k < n_nodes; ++k)
        out.src_offsets[k + 1] += out.src_offsets[k];
    out.src_perm.resize(n_dir);
    std::vector<std::uint32_t> cursor(out.src_offsets.begin(), out.src_offsets.end() - 1);
    for (std::uint32_t e = 0; e < n_dir; ++e)
        out.src_perm[cursor[out.source[e]]++] = e;

    return out;
}

std::vector<SpatialGraph::Edge> finalize_edges(std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs,
                                               const std::vector<EmpiricalDistribution> &dists, const LosFn &los)
{
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

    std::vector<SpatialGraph::Edge> edges(pairs.size());
    parallel_blocks(pairs.size(),
                    [&](std::size_t begin, std::size_t end, std::size_t)
                    {
                        for (std::size_t e = begin; e < end; ++e)
                        {
                            const auto [u, v] = pairs[e];
                            edges[e].u = u;
                            edges[e].v = v;
                            edges[e].w_dist = wasserstein_1d(dists[u], dists[v]);
                            edges[e].los = los(u, v);
                            edges[e].weight = 0.0; // filled once tau_w is known
                        }
                    });
    return edges;
}

double median_w(const std::vector<SpatialGraph::Edge> &edges)
{
    if (edges.empty())
        return 1.0;
    std::vector<double> w(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i)
        w[i] = edges[i].w_dist;
    std::sort(w.begin(), w.end());
    const std::size_t m = w.size() / 2;
    const double med = (w.size() % 2 == 1) ? w[m] : 0.5 * (w[m - 1] + w[m]);
    return med > 0.0 ? med : 1.0;
}

} // namespace

double SpatialGraph::laplacian_quadratic(const MatRM &x) const
{
    double total = 0.0;
    for (const Edge &e : edges)
        total += e.weight * (x.row(e.u) - x.row(e.v)).squaredNorm();
    return total;
}

Eigen::MatrixXd SpatialGraph::dense_adjacency() const
{
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_nodes),
                                              static_cast<Eigen::Index>(n_nodes));
    for (const Edge &e : edges)
    {
        a(e.u, e.v) = e.weight;
        a(e.v, e.u) = e.weight;
    }
    return a;
}

Eigen::MatrixXd SpatialGraph::dense_laplacian() const
{
    Eigen::MatrixXd a = dense_adjacency();
    Eigen::MatrixXd l = -a;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        l(i, i) = a.row(i).sum();
    return l;
}

SpatialGraph build_graph(const std::vector<EmpiricalDistribution> &dists,
                         const std::vector<std::pair<double, double>> &coords, std::size_t k, double tau_w,
                         const LosFn &los, GraphMetric metric)
{
    const std::size_t n = coords.size();
    if (n < 2)
        throw std::invalid_argument("build_graph: need at least 2 nodes");
    if (k < 1 || k >= n)
        throw std::invalid_argument("build_graph: K must satisfy 1 <= K < n_nodes");
    if (dists.size() != n)
        throw std::invalid_argument("build_graph: one distribution per node required");

    // per-node K nearest under the metric, ties by ascending node index
    std::vector<std::vector<std::uint32_t>> selected(n);
    parallel_blocks(n,
                    [&](std::size_t begin, std::size_t end, std::size_t)
                    {
                        std::vector<std::pair<double, std::uint32_t>> cand;
                        for (std::size_t i = begin; i < end; ++i)
                        {
                            cand.clear();
                            cand.reserve(n - 1);
                            for (std::size_t j = 0; j < n; ++j)
                            {
                                if (j == i)
                                    continue;
                                const double d = metric == GraphMetric::Wasserstein
                                                     ? wasserstein_1d(dists[i], dists[j])
                                                     : euclid(coords[i], coords[j]);
                                cand.emplace_back(d, static_cast<std::uint32_t>(j));
                            }
                            std::nth_element(cand.begin(), cand.begin() + static_cast<long>(k - 1), cand.end());
                            cand.resize(k);
                            std::sort(cand.begin(), cand.end());
                            selected[i].reserve(k);
                            for (const auto &[d, j] : cand)
                                selected[i].push_back(j);
                        }
                    });

    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    pairs.reserve(n * k);
    for (std::size_t i = 0; i < n; ++i)
        for (const std::uint32_t j : selected[i])
            pairs.emplace_back(std::min<std::uint32_t>(static_cast<std::uint32_t>(i), j),
                               std::max<std::uint32_t>(static_cast<std::uint32_t>(i), j));

    SpatialGraph graph;
    graph.n_nodes = n;
    graph.coords = coords;
    graph.edges = finalize_edges(std::move(pairs), dists, los);
    graph.tau_w = tau_w > 0.0 ? tau_w : median_w(graph.edges);
    for (auto &e : graph.edges)
        e.weight = std::exp(-e.w_dist / graph.tau_w);
    graph.full = build_active_edges(n, graph.edges, coords);
    graph.build_info.k = static_cast<std::uint32_t>(k);
    graph.build_info.metric = metric;
    return graph;
}

SpatialGraph append_nodes(const SpatialGraph &base, const std::vector<EmpiricalDistribution> &all_dists,
                          const std::vector<std::pair<double, double>> &new_coords, const LosFn &los)
{
    const std::size_t n_old = base.n_nodes;
    const std::size_t n = n_old + new_coords.size();
    if (all_dists.size() != n)
        throw std::invalid_argument("append_nodes: need a distribution for every old and new node");

    SpatialGraph graph;
    graph.n_nodes = n;
    graph.coords = base.coords;
    graph.coords.insert(graph.coords.end(), new_coords.begin(), new_coords.end());
    graph.tau_w = base.tau_w;
    graph.build_info = base.build_info;
    graph.edges = base.edges;

    const std::size_t k = base.build_info.k;
    const GraphMetric metric = base.build_info.metric;

    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    std::vector<std::pair<double, std::uint32_t>> cand;
    for (std::size_t i = n_old; i < n; ++i)
    {
        cand.clear();
        for (std::size_t j = 0; j < n; ++j)
        {
            if (j == i)
                continue;
            const double d = metric == GraphMetric::Wasserstein ? wasserstein_1d(all_dists[i], all_dists[j])
                                                                : euclid(graph.coords[i], graph.coords[j]);
            cand.emplace_back(d, static_cast<std::uint32_t>(j));
        }
        std::nth_element(cand.begin(), cand.begin() + static_cast<long>(k - 1), cand.end());
        cand.resize(k);
        std::sort(cand.begin(), cand.end());
        for (const auto &[d, j] : cand)
            pairs.emplace_back(std::min<std::uint32_t>(static_cast<std::uint32_t>(i), j),
                               std::max<std::uint32_t>(static_cast<std::uint32_t>(i), j));
    }

    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    for (const auto &[u, v] : pairs)
    {
        SpatialGraph::Edge e;
        e.u = u;
        e.v = v;
        e.w_dist = wasserstein_1d(all_dists[u], all_dists[v]);
        e.los = los(u, v);
        e.weight = std::exp(-e.w_dist / graph.tau_w);
        graph.edges.push_back(e);
    }

    graph.full = build_active_edges(n, graph.edges, graph.coords);
    return graph;
}

namespace
{
template <typename T> void put(std::ofstream &f, const T &v)
{
    f.write(reinterpret_cast<const char *>(&v), sizeof(T));
}
template <typename T> T take(std::ifstream &f)
{
    T v;
    f.read(reinterpret_cast<char *>(&v), sizeof(T));
    return v;
}
} // namespace

void write_graph(const SpatialGraph &graph, const std::string &path)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("write_graph: cannot open '" + path + "'");
    f.write("CGRF", 4);
    put<std::uint32_t>(f, 1);
    put<std::uint64_t>(f, graph.n_nodes);
    put<double>(f, graph.tau_w);
    put<std::uint32_t>(f, graph.build_info.k);
    put<std::uint32_t>(f, graph.build_info.metric == GraphMetric::Wasserstein ? 0u : 1u);
    put<std::uint32_t>(f, graph.build_info.mode == FeatureMode::Concat ? 0u : 1u);
    put<double>(f, graph.build_info.idw_power);
    put<std::uint32_t>(f, graph.build_info.use_prior ? 1u : 0u);
    for (const auto &[x, y] : graph.coords)
    {
        put<double>(f, x);
        put<double>(f, y);
    }
    put<std::uint64_t>(f, graph.edges.size());
    for (const auto &e : graph.edges)
    {
        put<std::uint32_t>(f, e.u);
        put<std::uint32_t>(f, e.v);
        put<double>(f, e.w_dist);
        put<double>(f, e.weight);
        put<double>(f, e.los);
    }
}

SpatialGraph read_graph(const std::string &path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("read_graph: cannot open '" + path + "'");
    char magic[4];
    f.read(magic, 4);
    if (std::string(magic, 4) != "CGRF")
        throw std::runtime_error("read_graph: bad magic in '" + path + "'");
    if (take<std::uint32_t>(f) != 1)
        throw std::runtime_error("read_graph: unsupported version");

    SpatialGraph graph;
    graph.n_nodes = take<std::uint64_t>(f);
    graph.tau_w = take<double>(f);
    graph.build_info.k = take<std::uint32_t>(f);
    graph.build_info.metric = take<std::uint32_t>(f) == 0 ? GraphMetric::Wasserstein : GraphMetric::Euclidean;
    graph.build_info.mode = take<std::uint32_t>(f) == 0 ? FeatureMode::Concat : FeatureMode::Polar;
    graph.build_info.idw_power = take<double>(f);
    graph.build_info.use_prior = take<std::uint32_t>(f) != 0;
    graph.coords.resize(graph.n_nodes);
    for (auto &[x, y] : graph.coords)
    {
        x = take<double>(f);
        y = take<double>(f);
    }
    graph.edges.resize(take<std::uint64_t>(f));
    for (auto &e : graph.edges)
    {
        e.u = take<std::uint32_t>(f);
        e.v = take<std::uint32_t>(f);
        e.w_dist = take<double>(f);
        e.weight = take<double>(f);
        e.los = take<double>(f);
    }
    if (!f)
        throw std::runtime_error("read_graph: truncated file '" + path + "'");
    graph.full = build_active_edges(graph.n_nodes, graph.edges, graph.coords);
    return graph;
}

void write_edge_csv(const SpatialGraph &graph, const std::string &path)
{
    std::ofstream f(path);
    if (!f)
        throw std::runtime_error("write_edge_csv: cannot open '" + path + "'");
    f << "u,v,dx,dy,d_euc,w_dist,los,weight\n";
    char buf[256];
    for (const auto &e : graph.edges)
    {
        const double dx = graph.coords[e.u].first - graph.coords[e.v].first;
        const double dy = graph.coords[e.u].second - graph.coords[e.v].second;
        std::snprintf(buf, sizeof(buf), "%u,%u,%.17g,%.17g,%.17g,%.17g,%g,%.17g\n", e.u, e.v, dx, dy,
                      std::sqrt(dx * dx + dy * dy), e.w_dist, e.los, e.weight);
        f << buf;
    }
}

} // namespace chanmap
