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

#include "chanmap/scene.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "chanmap/config.hpp"

namespace chanmap
{

Vec3 object_position(const DynamicObject &obj, double t)
{
    if (obj.waypoints.empty())
        throw std::out_of_range("dynamic object '" + obj.name + "' has no waypoints");
    const double t0 = obj.waypoints.front().first;
    const double t1 = obj.waypoints.back().first;
    if (t < t0 || t > t1)
        throw std::out_of_range("time " + std::to_string(t) + " outside waypoint span of '" + obj.name + "'");

    for (std::size_t i = 0; i + 1 < obj.waypoints.size(); ++i)
    {
        const auto &[ta, pa] = obj.waypoints[i];
        const auto &[tb, pb] = obj.waypoints[i + 1];
        if (t <= tb)
        {
            const double alpha = (t - ta) / (tb - ta);
            return pa + (pb - pa) * alpha;
        }
    }
    return obj.waypoints.back().second;
}

double object_max_speed(const DynamicObject &obj)
{
    double v_max = 0.0;
    for (std::size_t i = 0; i + 1 < obj.waypoints.size(); ++i)
    {
        const auto &[ta, pa] = obj.waypoints[i];
        const auto &[tb, pb] = obj.waypoints[i + 1];
        v_max = std::max(v_max, distance(pa, pb) / (tb - ta));
    }
    return v_max;
}

LocationGrid build_grid(std::size_t rows, std::size_t cols, double spacing_m, const Vec3 &origin, double rx_height)
{
    if (rows < 1 || cols < 1)
        throw std::invalid_argument("grid dimensions must be >= 1");
    if (spacing_m <= 0.0)
        throw std::invalid_argument("grid spacing must be > 0");

    LocationGrid grid;
    grid.rows = rows;
    grid.cols = cols;
    grid.spacing_m = spacing_m;
    grid.origin = origin;
    grid.rx_height = rx_height;
    grid.coordinates.reserve(rows * cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            grid.coordinates.emplace_back(origin.x + static_cast<double>(c) * spacing_m,
                                          origin.y + static_cast<double>(r) * spacing_m);
    return grid;
}

namespace
{

void validate_dynamic(const DynamicObject &obj)
{
    if (obj.waypoints.size() < 1)
        throw std::invalid_argument("dynamic object '" + obj.name + "' needs at least one waypoint");
    for (std::size_t i = 0; i + 1 < obj.waypoints.size(); ++i)
        if (obj.waypoints[i + 1].first <= obj.waypoints[i].first)
            throw std::invalid_argument("dynamic object '" + obj.name + "': waypoint times must strictly increase");
    const double t0 = obj.waypoints.front().first;
    const double t1 = obj.waypoints.back().first;
    if (obj.t_start < t0 || obj.t_end > t1 || obj.t_start > obj.t_end)
        throw std::invalid_argument("dynamic object '" + obj.name + "': active interval outside waypoint span");
}

void validate_scene(const Scene &scene)
{
    if (scene.carrier_hz <= 0.0)
        throw std::invalid_argument("scene: carrier_hz must be > 0");
    if (scene.bandwidth_hz <= 0.0)
        throw std::invalid_argument("scene: bandwidth_hz must be > 0");
    for (const Surface &s : scene.surfaces)
    {
        if (s.reflection_loss_db < 0.0)
            throw std::invalid_argument("surface '" + s.name + "': reflection_loss_db must be >= 0");
        if (std::abs(s.polygon.signed_distance(scene.tx_position)) < 1e-9 &&
            s.polygon.contains(scene.tx_position))
            throw std::invalid_argument("scene: tx position lies on surface '" + s.name + "'");
    }
    for (const DynamicObject &obj : scene.dynamic_objects)
        validate_dynamic(obj);
}

std::vector<Vec3> parse_vertices(const std::string &text)
{
    // "x,y,z; x,y,z; ..." triples
    std::vector<Vec3> out;
    std::stringstream ss(text);
    std::string triple;
    while (std::getline(ss, triple, ';'))
    {
        const std::vector<double> v = parse_double_list(triple);
        if (v.empty())
            continue;
        if (v.size() != 3)
            throw std::invalid_argument("surface vertices: expected 'x,y,z' triples, got '" + triple + "'");
        out.push_back({v[0], v[1], v[2]});
    }
    return out;
}

std::vector<std::pair<double, Vec3>> parse_waypoints(const std::string &text)
{
    // "t,x,y,z; t,x,y,z; ..." quadruples
    std::vector<std::pair<double, Vec3>> out;
    std::stringstream ss(text);
    std::string quad;
    while (std::getline(ss, quad, ';'))
    {
        const std::vector<double> v = parse_double_list(quad);
        if (v.empty())
            continue;
        if (v.size() != 4)
            throw std::invalid_argument("waypoints: expected 't,x,y,z' entries, got '" + quad + "'");
        out.emplace_back(v[0], Vec3{v[1], v[2], v[3]});
    }
    return out;
}

} // namespace

Scene load_scene(const std::string &config_text)
{
    const ConfigDoc doc = ConfigDoc::parse(config_text);

    const ConfigSection *tx = doc.find("tx");
    if (tx == nullptr)
        throw std::invalid_argument("scene: missing [tx] section");

    Scene scene;
    scene.tx_height = tx->get_double("height", 3.0);
    scene.tx_position = {tx->get_double("x"), tx->get_double("y"), scene.tx_height};
    scene.carrier_hz = tx->get_double("carrier_hz");
    scene.bandwidth_hz = tx->get_double("bandwidth_hz");

    if (const ConfigSection *g = doc.find("grid"); g != nullptr)
    {
        const Vec3 origin{g->get_double("origin_x", 0.0), g->get_double("origin_y", 0.0), 0.0};
        scene.grid = build_grid(static_cast<std::size_t>(g->get_int("rows")),
                                static_cast<std::size_t>(g->get_int("cols")), g->get_double("spacing_m"), origin,
                                g->get_double("rx_height", 1.5));
    }

    for (const ConfigSection *sec : doc.find_prefix("surface."))
    {
        Surface s;
        s.name = sec->name.substr(8);
        s.polygon = Polygon3::make(parse_vertices(sec->get_string("vertices")));
        s.reflection_loss_db = sec->get_double("reflection_loss_db", 0.0);
        scene.surfaces.push_back(std::move(s));
    }

    for (const ConfigSection *sec : doc.find_prefix("dynamic."))
    {
        DynamicObject obj;
        obj.name = sec->name.substr(8);
        obj.waypoints = parse_waypoints(sec->get_string("waypoints"));
        obj.scatter_gain_db = sec->get_double("scatter_gain_db", 0.0);
        const std::vector<double> act = sec->get_doubles("active");
        if (act.size() != 2)
            throw std::invalid_argument("dynamic object '" + obj.name + "': active must be 't_start,t_end'");
        obj.t_start = act[0];
        obj.t_end = act[1];
        scene.dynamic_objects.push_back(std::move(obj));
    }

    validate_scene(scene);
    return scene;
}

Scene load_scene_file(const std::string &path)
{
    std::ifstream f(path);
    if (!f)
        throw std::invalid_argument("scene: cannot open file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return load_scene(ss.str());
}

std::string save_scene(const Scene &scene)
{
    std::ostringstream out;
    out << std::setprecision(17);

    out << "[tx]\n";
    out << "x = " << scene.tx_position.x << "\n";
    out << "y = " << scene.tx_position.y << "\n";
    out << "height = " << scene.tx_height << "\n";
    out << "carrier_hz = " << scene.carrier_hz << "\n";
    out << "bandwidth_hz = " << scene.bandwidth_hz << "\n";

    if (scene.grid)
    {
        const LocationGrid &g = *scene.grid;
        out << "\n[grid]\n";
        out << "rows = " << g.rows << "\n";
        out << "cols = " << g.cols << "\n";
        out << "spacing_m = " << g.spacing_m << "\n";
        out << "origin_x = " << g.origin.x << "\n";
        out << "origin_y = " << g.origin.y << "\n";
        out << "rx_height = " << g.rx_height << "\n";
    }

    for (const Surface &s : scene.surfaces)
    {
        out << "\n[surface." << s.name << "]\n";
        out << "vertices = ";
        for (std::size_t i = 0; i < s.polygon.vertices().size(); ++i)
        {
            const Vec3 &v = s.polygon.vertices()[i];
            out << v.x << "," << v.y << "," << v.z;
            if (i + 1 < s.polygon.vertices().size())
                out << "; ";
        }
        out << "\n";
        out << "reflection_loss_db = " << s.reflection_loss_db << "\n";
    }

    for (const DynamicObject &obj : scene.dynamic_objects)
    {
        out << "\n[dynamic." << obj.name << "]\n";
        out << "waypoints = ";
        for (std::size_t i = 0; i < obj.waypoints.size(); ++i)
        {
            const auto &[t, p] = obj.waypoints[i];
            out << t << "," << p.x << "," << p.y << "," << p.z;
            if (i + 1 < obj.waypoints.size())
                out << "; ";
        }
        out << "\n";
        out << "scatter_gain_db = " << obj.scatter_gain_db << "\n";
        out << "active = " << obj.t_start << "," << obj.t_end << "\n";
    }

    return out.str();
}

bool scene_equal(const Scene &a, const Scene &b, double tol)
{
    auto eq = [tol](double x, double y) { return std::abs(x - y) <= tol; };
    auto veq = [&](const Vec3 &x, const Vec3 &y) { return eq(x.x, y.x) && eq(x.y, y.y) && eq(x.z, y.z); };

    if (!veq(a.tx_position, b.tx_position) || !eq(a.carrier_hz, b.carrier_hz) ||
        !eq(a.bandwidth_hz, b.bandwidth_hz) || a.surfaces.size() != b.surfaces.size() ||
        a.dynamic_objects.size() != b.dynamic_objects.size() || a.grid.has_value() != b.grid.has_value())
        return false;

    for (std::size_t i = 0; i < a.surfaces.size(); ++i)
    {
        const Surface &sa = a.surfaces[i], &sb = b.surfaces[i];
        if (sa.name != sb.name || !eq(sa.reflection_loss_db, sb.reflection_loss_db) ||
            sa.polygon.vertices().size() != sb.polygon.vertices().size())
            return false;
        for (std::size_t j = 0; j < sa.polygon.vertices().size(); ++j)
            if (!veq(sa.polygon.vertices()[j], sb.polygon.vertices()[j]))
                return false;
    }

    for (std::size_t i = 0; i < a.dynamic_objects.size(); ++i)
    {
        const DynamicObject &oa = a.dynamic_objects[i], &ob = b.dynamic_objects[i];
        if (oa.name != ob.name || !eq(oa.scatter_gain_db, ob.scatter_gain_db) || !eq(oa.t_start, ob.t_start) ||
            !eq(oa.t_end, ob.t_end) || oa.waypoints.size() != ob.waypoints.size())
            return false;
        for (std::size_t j = 0; j < oa.waypoints.size(); ++j)
            if (!eq(oa.waypoints[j].first, ob.waypoints[j].first) ||
                !veq(oa.waypoints[j].second, ob.waypoints[j].second))
                return false;
    }

    if (a.grid)
    {
        if (a.grid->rows != b.grid->rows || a.grid->cols != b.grid->cols ||
            !eq(a.grid->spacing_m, b.grid->spacing_m) || !veq(a.grid->origin, b.grid->origin) ||
            !eq(a.grid->rx_height, b.grid->rx_height))
            return false;
    }
    return true;
}

} // namespace chanmap
