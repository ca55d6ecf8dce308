#pragma once

#include <cstdint>
#include <thread>
#include <utility>
#include <vector>

namespace tg {

/// Resolve a thread-count request: n > 0 is taken as-is, n == 0 consults the
/// TAYLORGRID_THREADS environment variable, then hardware concurrency.
int resolve_threads(int requested);

/// Splits [0, n) into at most `threads` contiguous chunks and runs
/// fn(begin, end, chunk_index) on each. Chunk boundaries depend only on
/// (n, threads), so any per-chunk buffers can be reduced in chunk order to
/// give run-to-run deterministic results for a fixed thread count.
template <class Fn>
void parallel_for(std::int64_t n, int threads, Fn&& fn) {
    if (n <= 0) return;
    const std::int64_t nthreads = std::min<std::int64_t>(threads < 1 ? 1 : threads, n);
    if (nthreads == 1) {
        fn(std::int64_t{0}, n, 0);
        return;
    }
    const std::int64_t chunk = (n + nthreads - 1) / nthreads;
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(nthreads) - 1);
    for (std::int64_t t = 1; t < nthreads; ++t) {
        const std::int64_t b = t * chunk;
        const std::int64_t e = std::min(n, b + chunk);
        if (b >= e) break;
        workers.emplace_back([&fn, b, e, t] { fn(b, e, static_cast<int>(t)); });
    }
    fn(std::int64_t{0}, std::min(n, chunk), 0);
    for (auto& w : workers) w.join();
}

}  // namespace tg
