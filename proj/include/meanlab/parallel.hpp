#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace meanlab {

// Worker count resolution: explicit flag > MEANLAB_THREADS > 1.
unsigned resolve_thread_count(int requested);

// Splits [0, total) into contiguous chunks, runs fn(begin, end) on each,
// and returns the per-chunk results in index order. Merging in chunk order
// keeps every reduction deterministic regardless of scheduling.
template <typename R, typename Fn>
std::vector<R> parallel_map_chunks(std::size_t total, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = 1;
    std::size_t chunks = std::min<std::size_t>(threads, total == 0 ? 1 : total);
    std::vector<R> results(chunks);
    if (chunks <= 1) {
        results[0] = fn(std::size_t{0}, total);
        return results;
    }
    std::vector<std::thread> pool;
    pool.reserve(chunks);
    std::size_t base = total / chunks, extra = total % chunks, begin = 0;
    for (std::size_t c = 0; c < chunks; ++c) {
        std::size_t len = base + (c < extra ? 1 : 0);
        std::size_t end = begin + len;
        pool.emplace_back([&results, &fn, c, begin, end] { results[c] = fn(begin, end); });
        begin = end;
    }
    for (auto& t : pool) t.join();
    return results;
}

} // namespace meanlab
