#pragma once

#include <algorithm>
#include <cstdint>
#include <thread>
#include <vector>

namespace critlat {

void set_thread_cap(int n);
int thread_cap();

// Splits [0, n) into a fixed number of chunks (independent of the thread count)
// and returns per-chunk results in chunk order, so reductions are deterministic.
template <class Result, class Fn>
std::vector<Result> chunked_map(std::uint64_t n, Fn fn, int chunks = 64) {
    if (n < static_cast<std::uint64_t>(chunks)) chunks = static_cast<int>(std::max<std::uint64_t>(n, 1));
    std::vector<Result> out(chunks);
    auto run = [&](int c) {
        std::uint64_t lo = n * c / chunks, hi = n * (c + 1) / chunks;
        out[c] = fn(lo, hi);
    };
    int workers = std::min(thread_cap(), chunks);
    if (workers <= 1 || n < 4096) {
        for (int c = 0; c < chunks; ++c) run(c);
        return out;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (int c = w; c < chunks; c += workers) run(c);
        });
    for (auto& t : pool) t.join();
    return out;
}

}  // namespace critlat
