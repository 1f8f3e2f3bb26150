#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace aclab {

// Worker-count resolution: explicit request > ACLAB_WORKERS env > hardware.
inline int resolve_workers(int requested = 0) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("ACLAB_WORKERS")) {
        const int w = std::atoi(env);
        if (w > 0) return w;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs fn(i) for i in [0, n). Each task writes only to its own index, so the
// combined result is independent of the worker count and of scheduling.
template <class F>
void parallel_for(std::size_t n, int workers, F&& fn) {
    workers = resolve_workers(workers);
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    const int nt = static_cast<int>(std::min<std::size_t>(workers, n));
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
}

}  // namespace aclab
