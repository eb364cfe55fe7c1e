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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace chanmap
{

// Minimal structured-text config: "[section]" headers followed by
// "key = value" lines; '#' starts a comment. Section names may be repeated
// ("[surface.north]", "[surface.south]", ...); order is preserved.
struct ConfigSection
{
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;

    bool has(const std::string &key) const;
    std::string get_string(const std::string &key) const; // throws if missing
    std::string get_string(const std::string &key, const std::string &fallback) const;
    double get_double(const std::string &key) const;
    double get_double(const std::string &key, double fallback) const;
    std::int64_t get_int(const std::string &key) const;
    std::int64_t get_int(const std::string &key, std::int64_t fallback) const;
    bool get_bool(const std::string &key, bool fallback) const;
    std::vector<double> get_doubles(const std::string &key) const; // comma/space separated
};

struct ConfigDoc
{
    std::vector<ConfigSection> sections;

    static ConfigDoc parse(const std::string &text); // throws std::invalid_argument with line info
    static ConfigDoc parse_file(const std::string &path);

    const ConfigSection *find(const std::string &name) const;
    std::vector<const ConfigSection *> find_prefix(const std::string &prefix) const;
};

std::vector<double> parse_double_list(const std::string &text);

} // namespace chanmap
