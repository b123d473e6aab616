#ifndef ITLM_PARALLEL_HPP
#define ITLM_PARALLEL_HPP

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "itlm/selection.hpp"

namespace itlm {

/// Runs fn(i) for i in [0, count) on up to `threads` workers pulling from
/// a shared counter. Callers keep results deterministic by writing into
/// slot i only, so the outcome is independent of the worker count. The
/// first exception wins; remaining work is abandoned and the exception
/// rethrown on the calling thread.
template <typename Fn>
void parallel_for(Index count, int threads, Fn&& fn) {
    if (count <= 0) {
        return;
    }
    const int workers = static_cast<int>(
        std::min<Index>(count, threads < 1 ? 1 : threads));
    if (workers == 1) {
        for (Index i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }

    std::atomic<Index> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto work = [&] {
        while (true) {
            const Index i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) {
                return;
            }
            try {
                fn(i);
            } catch (...) {
                {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) {
                        first_error = std::current_exception();
                    }
                }
                next.store(count, std::memory_order_relaxed);
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back(work);
    }
    for (std::thread& t : pool) {
        t.join();
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
}

} // namespace itlm

#endif // ITLM_PARALLEL_HPP
