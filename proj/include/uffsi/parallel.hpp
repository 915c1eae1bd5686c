#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace uffsi {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Static block partition of [0, n). Each worker owns a contiguous range and
// must write only its own slots, so results never depend on the schedule.
template <typename Fn>
void parallel_for(std::int64_t n, int threads, Fn&& fn) {
    threads = resolve_threads(threads);
    if (n <= 0) return;
    if (threads <= 1 || n == 1) {
        fn(static_cast<std::int64_t>(0), n);
        return;
    }
    std::int64_t workers = std::min<std::int64_t>(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    std::int64_t chunk = n / workers;
    std::int64_t rem = n % workers;
    std::int64_t begin = 0;
    for (std::int64_t w = 0; w < workers; ++w) {
        std::int64_t len = chunk + (w < rem ? 1 : 0);
        std::int64_t end = begin + len;
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
        begin = end;
    }
    for (auto& t : pool) t.join();
}

}  // namespace uffsi
