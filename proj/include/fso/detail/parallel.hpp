#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace fso::detail {

/// Run fn(i) for i in [0, n) on `workers` threads (striped). Results must be
/// written to per-index slots so the outcome is independent of scheduling.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::size_t w = static_cast<std::size_t>(workers) < n ? static_cast<std::size_t>(workers) : n;
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (std::size_t t = 0; t < w; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += w) fn(i);
        });
    for (std::thread& th : pool) th.join();
}

} // namespace fso::detail
