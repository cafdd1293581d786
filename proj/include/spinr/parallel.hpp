#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace spinr {

// Global worker count for batch loops. 0 selects hardware_concurrency.
// With 1, all parallel_for loops run inline on the calling thread, which
// makes every pipeline stage bit-reproducible.
void set_thread_count(unsigned n);
unsigned thread_count();

// Static partition of [0, n) into one contiguous chunk per worker.
// fn(begin, end, worker_index). Chunk boundaries depend only on (n, workers),
// so a fixed thread count gives a fixed work assignment.
template <class F>
void parallel_for(std::size_t n, F&& fn) {
    if (n == 0) return;
    const unsigned workers = thread_count();
    if (workers <= 1 || n == 1) {
        fn(std::size_t{0}, n, 0u);
        return;
    }
    const unsigned used = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    std::vector<std::thread> pool;
    pool.reserve(used - 1);
    for (unsigned t = 1; t < used; ++t) {
        const std::size_t lo = n * t / used;
        const std::size_t hi = n * (t + 1) / used;
        pool.emplace_back([&fn, lo, hi, t] { fn(lo, hi, t); });
    }
    fn(std::size_t{0}, n * 1 / used, 0u);
    for (auto& th : pool) th.join();
}

}  // namespace spinr
