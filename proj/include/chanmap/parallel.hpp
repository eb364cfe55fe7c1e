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

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace chanmap
{

// Fixed block count used by every parallel primitive. Results depend only on
// the block partition, never on the number of hardware threads, so serial and
// parallel execution produce identical output.
inline constexpr std::size_t kParallelBlocks = 16;

// Run fn(begin, end, block_index) over a fixed partition of [0, n) into
// n_blocks contiguous ranges. Blocks must write disjoint outputs.
inline void parallel_blocks(std::size_t n, const std::function<void(std::size_t, std::size_t, std::size_t)> &fn,
                            std::size_t n_blocks = kParallelBlocks)
{
    if (n == 0)
        return;
    if (n_blocks > n)
        n_blocks = n;

    std::size_t n_threads = std::thread::hardware_concurrency();
    if (n_threads == 0)
        n_threads = 1;
    if (n_threads > n_blocks)
        n_threads = n_blocks;

    if (n_threads <= 1)
    {
        for (std::size_t b = 0; b < n_blocks; ++b)
        {
            const std::size_t begin = b * n / n_blocks;
            const std::size_t end = (b + 1) * n / n_blocks;
            fn(begin, end, b);
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&]()
    {
        for (;;)
        {
            const std::size_t b = next.fetch_add(1);
            if (b >= n_blocks)
                return;
            const std::size_t begin = b * n / n_blocks;
            const std::size_t end = (b + 1) * n / n_blocks;
            fn(begin, end, b);
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(n_threads - 1);
    for (std::size_t i = 0; i + 1 < n_threads; ++i)
        pool.emplace_back(worker);
    worker();
    for (auto &t : pool)
        t.join();
}

} // namespace chanmap
