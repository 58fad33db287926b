#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace pdenet {

/// Splits [0, count) into `threads` contiguous chunks and runs fn(chunk_index,
/// begin, end) on each. Chunk boundaries depend only on (count, threads), so
/// per-chunk results can be reduced in chunk order for deterministic sums.
inline void parallel_chunks(int count, int threads,
                            const std::function<void(int, int, int)>& fn) {
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        if (count > 0) fn(0, 0, count);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const int base = count / threads, extra = count % threads;
    int begin = 0;
    for (int t = 0; t < threads; ++t) {
        const int len = base + (t < extra ? 1 : 0);
        const int end = begin + len;
        pool.emplace_back([&fn, t, begin, end] { fn(t, begin, end); });
        begin = end;
    }
    for (auto& th : pool) th.join();
}

} // namespace pdenet
