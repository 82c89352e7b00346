#ifndef CCSK_HARNESS_PARALLEL_HPP
#define CCSK_HARNESS_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace ccsk::harness {

// Worker count: explicit request, else $CCSK_THREADS, else hardware concurrency.
inline std::size_t worker_count(std::size_t requested = 0)
{
    if (requested > 0) return requested;
    if (const char* env = std::getenv("CCSK_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<std::size_t>(v);
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// Runs fn(job) for job in [0, jobs) on up to `workers` threads. Jobs must
// write only to their own output slot; the first exception is rethrown.
template <typename Fn>
void parallel_for(std::size_t jobs, std::size_t workers, Fn&& fn)
{
    workers = std::min(std::max<std::size_t>(workers, 1), std::max<std::size_t>(jobs, 1));
    if (workers == 1) {
        for (std::size_t j = 0; j < jobs; ++j) fn(j);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t j = next++; j < jobs; j = next++) {
                try {
                    fn(j);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

} // namespace ccsk::harness

#endif
