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

#include <vector>

#include "chanmap/cir.hpp"
#include "chanmap/scene.hpp"

namespace chanmap
{

// Image-method specular tracer: LoS plus reflections up to max_order (2) off
// the scene surfaces, with occlusion tests on every path leg. Ray powers
// follow free-space loss (lambda / 4 pi d)^2 times the per-bounce reflection
// losses. No diffraction, no transmission.
std::vector<RayPath> trace_specular(const Scene &scene, const Vec3 &rx, int max_order = 2);

// True if the segment a->b crosses no surface. Surfaces listed in
// ignore_a/ignore_b are exempted near the respective endpoint (bounce point).
bool segment_clear(const Scene &scene, const Vec3 &a, const Vec3 &b, int ignore_a = -1, int ignore_b = -1);

// True if p has an unobstructed path to the Tx.
bool tx_visible(const Scene &scene, const Vec3 &p);

} // namespace chanmap
