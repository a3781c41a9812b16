#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace synreg {

inline int default_workers() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

// Splits [0, n) into one contiguous chunk per worker and runs
// fn(begin, end, worker_index) on each. Callers that accumulate must keep
// per-worker partials and combine them in worker order so that results do
// not depend on scheduling.
inline void parallel_chunks(std::size_t n, int workers,
                            const std::function<void(std::size_t, std::size_t, int)>& fn) {
    if (workers < 1) workers = 1;
    if (n == 0) return;
    if (workers == 1 || n < 2048) {
        fn(0, n, 0);
        return;
    }
    const std::size_t w = static_cast<std::size_t>(workers);
    std::vector<std::thread> threads;
    threads.reserve(w);
    for (std::size_t t = 0; t < w; ++t) {
        const std::size_t begin = n * t / w;
        const std::size_t end = n * (t + 1) / w;
        if (begin == end) continue;
        threads.emplace_back([&fn, begin, end, t] { fn(begin, end, static_cast<int>(t)); });
    }
    for (auto& th : threads) th.join();
}

} // namespace synreg
