#pragma once

#include "seloqr/types.hpp"

#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace seloqr {

/// 0 means one worker per hardware thread.
inline int resolve_threads(int requested) {
    if (requested < 0) throw contract_error("threads must be >= 0");
    if (requested > 0) return requested;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

/// Runs body(i) for i in [0, count). Each index writes only its own output
/// slot, so results are independent of the thread count; work is dealt by
/// fixed stride. If any calls throw, the exception with the smallest index is
/// rethrown after all workers finish.
inline void parallel_for(std::size_t count, int threads,
                         const std::function<void(std::size_t)>& body) {
    if (count == 0) return;
    const std::size_t T =
        std::min<std::size_t>(static_cast<std::size_t>(resolve_threads(threads)), count);
    if (T <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errs(count);
    std::vector<std::thread> pool;
    pool.reserve(T);
    for (std::size_t w = 0; w < T; ++w) {
        pool.emplace_back([&, w]() {
            for (std::size_t i = w; i < count; i += T) {
                try {
                    body(i);
                } catch (...) {
                    errs[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (std::size_t i = 0; i < count; ++i)
        if (errs[i]) std::rethrow_exception(errs[i]);
}

}  // namespace seloqr
