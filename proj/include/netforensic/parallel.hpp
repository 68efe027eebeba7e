#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace nf {

/// Runs fn(begin, end, chunk_index) over `workers` contiguous chunks of
/// [0, n). Chunks are fixed by (n, workers) so per-chunk partial results can be
/// combined in chunk order. The first exception thrown by a worker is rethrown.
template <typename Fn>
void parallel_chunks(std::size_t n, unsigned workers, Fn&& fn) {
    workers = std::max(1u, workers);
    if (workers == 1 || n < 2 * static_cast<std::size_t>(workers)) {
        fn(std::size_t{0}, n, std::size_t{0});
        return;
    }
    std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w) {
        std::size_t begin = std::min(n, w * chunk);
        std::size_t end = std::min(n, begin + chunk);
        pool.emplace_back([&, begin, end, w] {
            try {
                fn(begin, end, static_cast<std::size_t>(w));
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

inline unsigned chunk_count(std::size_t n, unsigned workers) {
    workers = std::max(1u, workers);
    return (workers == 1 || n < 2 * static_cast<std::size_t>(workers)) ? 1u : workers;
}

}  // namespace nf
