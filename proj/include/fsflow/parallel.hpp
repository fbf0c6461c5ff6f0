#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace fsflow {

/// Static strided parallel map over [0, n). Each index writes only its own
/// output slot, so results are identical for any thread count.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const int t_use = static_cast<int>(std::min<std::size_t>(threads, n));
    std::vector<std::thread> pool;
    pool.reserve(t_use);
    for (int t = 0; t < t_use; ++t)
        pool.emplace_back([&, t]() {
            for (std::size_t i = t; i < n; i += t_use) fn(i);
        });
    for (auto& th : pool) th.join();
}

} // namespace fsflow
