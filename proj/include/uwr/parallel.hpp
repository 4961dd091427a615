#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace uwr {

// Runs fn(i) for i in [0, count) on up to max_threads workers. Work items are
// claimed through an atomic counter; callers that need scheduling-independent
// results must write into per-index slots and combine them in index order.
inline void parallel_for_index(std::size_t count,
                               const std::function<void(std::size_t)>& fn,
                               unsigned max_threads = 0) {
    if (count == 0) return;
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (max_threads == 0) max_threads = hw;
    unsigned n_threads = static_cast<unsigned>(
        std::min<std::size_t>(count, std::min(hw, max_threads)));
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) break;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

} // namespace uwr
