#ifndef NAMBU_PARALLEL_HPP
#define NAMBU_PARALLEL_HPP

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace nambu {

inline int default_threads() {
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : (int)hw;
}

// Runs fn(chunk_index, lo, hi) over a static split of [0, count) on the
// requested number of workers. Chunks are contiguous and their order is
// fixed, so any associative-commutative merge of per-chunk results is
// schedule-independent.
inline void parallel_chunks(std::size_t count, int threads,
                            const std::function<void(int, std::size_t, std::size_t)>& fn) {
    if (threads < 1) threads = 1;
    std::size_t nchunks = std::min<std::size_t>((std::size_t)threads, count ? count : 1);
    if (nchunks <= 1) {
        fn(0, 0, count);
        return;
    }
    std::vector<std::thread> pool;
    std::size_t base = count / nchunks, rem = count % nchunks;
    std::size_t lo = 0;
    for (std::size_t c = 0; c < nchunks; ++c) {
        std::size_t hi = lo + base + (c < rem ? 1 : 0);
        pool.emplace_back([&fn, c, lo, hi] { fn((int)c, lo, hi); });
        lo = hi;
    }
    for (auto& t : pool) t.join();
}

// Parallel map over items 0..count-1, one result slot per item.
template <class F>
void parallel_for_each(std::size_t count, int threads, F&& fn) {
    parallel_chunks(count, threads, [&](int, std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
}

} // namespace nambu

#endif
