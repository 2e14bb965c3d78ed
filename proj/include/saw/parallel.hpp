#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

#include "saw/common.hpp"

namespace saw {

/// Runs fn(i) for i in [0, n) on up to `threads` workers using contiguous
/// static chunks. fn must only write state owned by index i, so results do not
/// depend on the thread count. The first exception (lowest chunk) is rethrown.
template <class F>
void parallel_for(Index n, int threads, F&& fn)
{
    if (n <= 0) return;
    const Index workers = std::clamp<Index>(threads, 1, n);
    if (workers == 1) {
        for (Index i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const Index chunk = (n + workers - 1) / workers;
    for (Index w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            const Index begin = w * chunk;
            const Index end = std::min(n, begin + chunk);
            try {
                for (Index i = begin; i < end; ++i) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace saw
