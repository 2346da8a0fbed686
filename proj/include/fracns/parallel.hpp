#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace fracns {

/// Number of workers for a `threads` setting; 0 means hardware concurrency.
inline unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Runs body(i) for i in [0, n) on `threads` workers pulling from a shared
/// counter. Callers write results into slot i, so merges are index-ordered and
/// independent of scheduling. The first exception thrown is rethrown.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
    threads = resolve_threads(threads);
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const unsigned count = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    pool.reserve(count);
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace fracns
