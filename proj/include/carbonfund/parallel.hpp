#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace carbonfund {

inline unsigned default_thread_count() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// Split [0, n) into at most n_threads contiguous chunks and run
// body(chunk_index, begin, end) on each. Chunk boundaries depend only on
// (n, n_threads), and callers fold per-chunk partials in chunk order, so
// results are reproducible for a fixed thread count.
template <typename Body>
void parallel_chunks(std::size_t n, unsigned n_threads, Body&& body) {
    if (n_threads <= 1 || n < 2) {
        if (n > 0) body(0, std::size_t{0}, n);
        return;
    }
    const auto chunks = std::min<std::size_t>(n_threads, n);
    const std::size_t base = n / chunks, rem = n % chunks;
    std::vector<std::thread> pool;
    pool.reserve(chunks);
    std::size_t begin = 0;
    for (std::size_t c = 0; c < chunks; ++c) {
        const std::size_t len = base + (c < rem ? 1 : 0);
        pool.emplace_back([&body, c, begin, end = begin + len] { body(c, begin, end); });
        begin += len;
    }
    for (auto& t : pool) t.join();
}

// Number of chunks parallel_chunks will create, for sizing partial buffers.
inline std::size_t chunk_count(std::size_t n, unsigned n_threads) {
    if (n_threads <= 1 || n < 2) return n > 0 ? 1 : 0;
    return std::min<std::size_t>(n_threads, n);
}

} // namespace carbonfund
