#ifndef LATWAVE_PARALLEL_HPP
#define LATWAVE_PARALLEL_HPP

#include <cstddef>
#include <cstdlib>
#include <thread>
#include <vector>

namespace latwave {

// Worker cap: LATTICE_WAVE_THREADS env var if set, else hardware
// concurrency clamped to 8. Always >= 1.
inline unsigned worker_count() {
    if (const char* env = std::getenv("LATTICE_WAVE_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    return hw > 8 ? 8 : hw;
}

// Runs fn(begin, end) over a fixed chunking of [0, n). Chunks are disjoint,
// so bodies that only write their own indices are deterministic for any
// worker count.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    unsigned w = worker_count();
    if (w <= 1 || n < 2048) {
        fn(std::size_t{0}, n);
        return;
    }
    std::size_t chunk = (n + w - 1) / w;
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (unsigned t = 0; t < w; ++t) {
        std::size_t b = std::min(n, std::size_t(t) * chunk);
        std::size_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&fn, b, e] { fn(b, e); });
    }
    for (auto& th : pool) th.join();
}

// Per-chunk accumulators, returned in chunk order so the caller merges
// deterministically.
template <class Acc, class Fn>
std::vector<Acc> parallel_reduce(std::size_t n, Fn&& fn) {
    unsigned w = worker_count();
    if (w <= 1 || n < 2048) {
        std::vector<Acc> accs(1);
        for (std::size_t i = 0; i < n; ++i) fn(i, accs[0]);
        return accs;
    }
    std::size_t chunk = (n + w - 1) / w;
    std::size_t parts = (n + chunk - 1) / chunk;
    std::vector<Acc> accs(parts);
    std::vector<std::thread> pool;
    pool.reserve(parts);
    for (std::size_t t = 0; t < parts; ++t) {
        std::size_t b = t * chunk;
        std::size_t e = std::min(n, b + chunk);
        pool.emplace_back([&fn, &accs, t, b, e] {
            for (std::size_t i = b; i < e; ++i) fn(i, accs[t]);
        });
    }
    for (auto& th : pool) th.join();
    return accs;
}

} // namespace latwave

#endif
