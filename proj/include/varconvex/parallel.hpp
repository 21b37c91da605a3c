#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace varconvex {

/// Worker count: VARCONVEX_THREADS if set, else hardware concurrency, capped.
inline int thread_count() {
    if (const char* env = std::getenv("VARCONVEX_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return std::min(n, 64);
    }
    unsigned hc = std::thread::hardware_concurrency();
    return static_cast<int>(std::min(hc == 0 ? 1u : hc, 8u));
}

/// Index-parallel map over [0, n). Each index writes only its own results, so
/// the outcome is identical regardless of scheduling.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    int workers = thread_count();
    if (workers <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    workers = static_cast<int>(std::min<std::size_t>(workers, n));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace varconvex
