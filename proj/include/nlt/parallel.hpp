#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace nlt {

/// Worker count from NLT_WORKERS when set, otherwise `fallback`.
int default_worker_count(int fallback = 1);

/// Static block partition of [0, n) over `workers` threads; `body(begin, end)` runs
/// once per block. The partition depends only on (n, workers), and callers write
/// results into disjoint slots, so output never depends on scheduling.
template <class Body>
void parallel_for(std::size_t n, int workers, Body&& body) {
    const std::size_t w = static_cast<std::size_t>(std::max(1, workers));
    if (w == 1 || n < 2 * w) {
        body(std::size_t{0}, n);
        return;
    }
    const std::size_t chunk = (n + w - 1) / w;
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(w);
    pool.reserve(w);
    for (std::size_t t = 0; t < w; ++t) {
        const std::size_t b = t * chunk;
        const std::size_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&, t, b, e] {
            try {
                body(b, e);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);
}

}  // namespace nlt
