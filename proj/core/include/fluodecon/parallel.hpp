#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace fluodecon {

/// Clamps a requested worker count to something sane; <= 0 means "use all
/// hardware threads".
inline int effective_threads(int requested) {
    const int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (requested <= 0) return std::max(1, hw);
    return std::max(1, requested);
}

/// Runs fn(begin, end) over contiguous chunks of [begin, end) on `threads`
/// workers. Chunks are disjoint, so writes to per-index output slots never
/// race, and results are independent of the worker count.
inline void parallel_chunks(int begin, int end, int threads,
                            const std::function<void(int, int)>& fn) {
    const int n = end - begin;
    threads = std::min(std::max(1, threads), std::max(1, n));
    if (threads == 1 || n <= 1) {
        if (n > 0) fn(begin, end);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(threads) - 1);
    const int base = n / threads;
    const int extra = n % threads;
    int chunk_begin = begin;
    for (int t = 0; t < threads; ++t) {
        const int chunk = base + (t < extra ? 1 : 0);
        const int chunk_end = chunk_begin + chunk;
        if (t == threads - 1) {
            fn(chunk_begin, chunk_end);
        } else {
            workers.emplace_back(fn, chunk_begin, chunk_end);
        }
        chunk_begin = chunk_end;
    }
    for (std::thread& w : workers) w.join();
}

}  // namespace fluodecon
