#pragma once
// Static row partitioning over a fixed number of workers. Each index is
// processed by exactly one thread in increasing order, so results do not
// depend on the worker count.

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace mqheat {

inline int default_workers() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

// f(begin, end) is called on disjoint contiguous ranges covering [0, n).
inline void parallel_ranges(int n, int workers,
                            const std::function<void(int, int)>& f) {
    workers = std::max(1, std::min(workers, n));
    if (workers == 1 || n <= 1) {
        if (n > 0) f(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    int chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        int b = w * chunk, e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&f, b, e] { f(b, e); });
    }
    for (auto& th : pool) th.join();
}

inline void parallel_for(int n, int workers, const std::function<void(int)>& f) {
    parallel_ranges(n, workers, [&f](int b, int e) {
        for (int i = b; i < e; ++i) f(i);
    });
}

}  // namespace mqheat
