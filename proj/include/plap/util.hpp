#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace plap {

/// Worker cap: min(hardware, PLAP_THREADS). PLAP_THREADS <= 1 disables
/// parallel loops.
inline int max_threads() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    if (const char* env = std::getenv("PLAP_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) hw = std::min(hw, cap);
    }
    return hw;
}

/// Worker count used for a loop of n items; small loops stay serial.
inline int plan_workers(int n) { return std::min(max_threads(), std::max(1, n / 512)); }

/// Splits [0, n) into contiguous chunks, one per worker. fn(worker, begin, end)
/// runs concurrently; workers get disjoint ranges and must write only to
/// worker-indexed buffers. Chunk layout depends only on the worker count, so
/// accumulating buffers in worker order is reproducible.
template <typename Fn>
inline int parallel_for_chunks(int n, Fn&& fn) {
    const int workers = plan_workers(n);
    if (workers <= 1) {
        fn(0, 0, n);
        return 1;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        const int begin = static_cast<int>(static_cast<long long>(n) * w / workers);
        const int end = static_cast<int>(static_cast<long long>(n) * (w + 1) / workers);
        pool.emplace_back([&fn, w, begin, end] { fn(w, begin, end); });
    }
    for (auto& t : pool) t.join();
    return workers;
}

}  // namespace plap
