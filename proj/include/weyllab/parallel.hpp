#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace weyllab {

namespace detail {
inline std::atomic<int>& thread_override()
{
    static std::atomic<int> n{0};
    return n;
}
} // namespace detail

// Worker count: explicit setting, else WEYLLAB_THREADS, else hardware concurrency.
inline int thread_count()
{
    int n = detail::thread_override().load();
    if (n > 0) return n;
    if (const char* env = std::getenv("WEYLLAB_THREADS")) {
        try {
            n = std::stoi(env);
        } catch (...) {
            n = 0;
        }
        if (n > 0) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

inline void set_thread_count(int n) { detail::thread_override().store(std::max(0, n)); }

// Runs body(i) for i in [0, n) on the worker pool. The body must only write
// to slots it owns.
template <class Body>
void parallel_for(std::size_t n, Body&& body, int threads = 0)
{
    if (threads <= 0) threads = thread_count();
    threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
        });
    for (auto& th : pool) th.join();
}

// Sum of term(i) over [0, n). Partial sums are taken over fixed-size chunks and
// combined in chunk order, so the result does not depend on the thread count.
template <class Term>
double ordered_sum(std::size_t n, Term&& term, std::size_t chunk = 4096)
{
    const std::size_t nchunks = (n + chunk - 1) / chunk;
    std::vector<double> partial(nchunks, 0.0);
    parallel_for(nchunks, [&](std::size_t c) {
        const std::size_t lo = c * chunk, hi = std::min(n, lo + chunk);
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += term(i);
        partial[c] = s;
    });
    double s = 0.0;
    for (double p : partial) s += p;
    return s;
}

} // namespace weyllab
