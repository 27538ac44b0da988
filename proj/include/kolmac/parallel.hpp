#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace kolmac {

/// Runs fn(i) for i in [begin, end) on `workers` threads. Indices are handed
/// out in chunks through a shared counter; fn must only write state owned by
/// index i. The first exception thrown by any worker is rethrown.
inline void parallel_for(std::size_t begin, std::size_t end, unsigned workers,
                         const std::function<void(std::size_t)>& fn,
                         std::size_t chunk = 16) {
    if (workers == 0) workers = 1;
    if (end <= begin) return;
    if (workers == 1 || end - begin == 1) {
        for (std::size_t i = begin; i < end; ++i) fn(i);
        return;
    }

    std::atomic<std::size_t> next{begin};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto body = [&] {
        for (;;) {
            if (failed.load(std::memory_order_relaxed)) return;
            std::size_t lo = next.fetch_add(chunk);
            if (lo >= end) return;
            std::size_t hi = lo + chunk < end ? lo + chunk : end;
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!failed.exchange(true)) error = std::current_exception();
                return;
            }
        }
    };

    std::vector<std::thread> threads;
    threads.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) threads.emplace_back(body);
    body();
    for (std::thread& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace kolmac
