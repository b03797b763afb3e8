#ifndef BILLIARD_PARALLEL_HPP
#define BILLIARD_PARALLEL_HPP

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace billiard {

/// Worker count: BILLIARD_THREADS when set, else hardware concurrency.
inline int default_thread_count() {
    if (const char* env = std::getenv("BILLIARD_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(0..n-1) on a small work pool. Tasks must be independent; callers
/// write results into per-index slots so the merge order is deterministic.
/// The first exception thrown by any task is rethrown after the join.
inline void parallel_for(size_t n, const std::function<void(size_t)>& fn, int threads = 0) {
    if (threads <= 0) threads = default_thread_count();
    if (threads == 1 || n <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= n || failed.load()) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const size_t count = std::min<size_t>(static_cast<size_t>(threads), n);
    pool.reserve(count);
    for (size_t t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

} // namespace billiard

#endif
