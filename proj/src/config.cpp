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

#include "chanmap/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace chanmap
{

namespace
{
std::string trim(const std::string &s)
{
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return s.substr(b, e - b);
}

double to_double(const std::string &s, const std::string &key)
{
    try
    {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size())
            throw std::invalid_argument("");
        return v;
    }
    catch (const std::exception &)
    {
        throw std::invalid_argument("config: value of '" + key + "' is not a number: '" + s + "'");
    }
}
} // namespace

bool ConfigSection::has(const std::string &key) const
{
    return std::any_of(entries.begin(), entries.end(), [&](const auto &kv) { return kv.first == key; });
}

std::string ConfigSection::get_string(const std::string &key) const
{
    for (const auto &kv : entries)
        if (kv.first == key)
            return kv.second;
    throw std::invalid_argument("config: missing key '" + key + "' in section [" + name + "]");
}

std::string ConfigSection::get_string(const std::string &key, const std::string &fallback) const
{
    return has(key) ? get_string(key) : fallback;
}

double ConfigSection::get_double(const std::string &key) const { return to_double(get_string(key), key); }

double ConfigSection::get_double(const std::string &key, double fallback) const
{
    return has(key) ? get_double(key) : fallback;
}

std::int64_t ConfigSection::get_int(const std::string &key) const
{
    const double v = get_double(key);
    const auto i = static_cast<std::int64_t>(v);
    if (static_cast<double>(i) != v)
        throw std::invalid_argument("config: value of '" + key + "' is not an integer");
    return i;
}

std::int64_t ConfigSection::get_int(const std::string &key, std::int64_t fallback) const
{
    return has(key) ? get_int(key) : fallback;
}

bool ConfigSection::get_bool(const std::string &key, bool fallback) const
{
    if (!has(key))
        return fallback;
    std::string v = get_string(key);
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "1" || v == "yes" || v == "on")
        return true;
    if (v == "false" || v == "0" || v == "no" || v == "off")
        return false;
    throw std::invalid_argument("config: value of '" + key + "' is not a boolean: '" + v + "'");
}

std::vector<double> ConfigSection::get_doubles(const std::string &key) const
{
    return parse_double_list(get_string(key));
}

std::vector<double> parse_double_list(const std::string &text)
{
    std::vector<double> out;
    std::string token;
    std::stringstream ss(text);
    while (std::getline(ss, token, ','))
    {
        std::stringstream ts(token);
        std::string word;
        while (ts >> word)
            out.push_back(to_double(word, "<list>"));
    }
    return out;
}

ConfigDoc ConfigDoc::parse(const std::string &text)
{
    ConfigDoc doc;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    ConfigSection *current = nullptr;

    while (std::getline(in, line))
    {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;

        if (line.front() == '[')
        {
            if (line.back() != ']')
                throw std::invalid_argument("config: malformed section header at line " + std::to_string(line_no));
            ConfigSection sec;
            sec.name = trim(line.substr(1, line.size() - 2));
            if (sec.name.empty())
                throw std::invalid_argument("config: empty section name at line " + std::to_string(line_no));
            doc.sections.push_back(std::move(sec));
            current = &doc.sections.back();
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected 'key = value' at line " + std::to_string(line_no));
        if (current == nullptr)
            throw std::invalid_argument("config: key outside any section at line " + std::to_string(line_no));
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("config: empty key at line " + std::to_string(line_no));
        current->entries.emplace_back(std::move(key), std::move(value));
    }
    return doc;
}

ConfigDoc ConfigDoc::parse_file(const std::string &path)
{
    std::ifstream f(path);
    if (!f)
        throw std::invalid_argument("config: cannot open file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

const ConfigSection *ConfigDoc::find(const std::string &name) const
{
    for (const auto &s : sections)
        if (s.name == name)
            return &s;
    return nullptr;
}

std::vector<const ConfigSection *> ConfigDoc::find_prefix(const std::string &prefix) const
{
    std::vector<const ConfigSection *> out;
    for (const auto &s : sections)
        if (s.name.rfind(prefix, 0) == 0)
            out.push_back(&s);
    return out;
}

} // namespace chanmap
