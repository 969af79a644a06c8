#pragma once

// Minimal index-parallel loop used for phase scans.  Results must be written
// by index so assembly order never depends on scheduling.

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cph::detail {

template <class Fn>
void parallel_for(int count, Fn&& fn) {
    unsigned workers = std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    workers = std::min<unsigned>(workers, count > 0 ? static_cast<unsigned>(count) : 1u);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }

    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace cph::detail
