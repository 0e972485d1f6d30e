#include "buildtime/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace buildtime {

namespace {

thread_local bool inside_worker = false;

} // namespace

std::size_t worker_count()
{
    if (const char* env = std::getenv("BUILDTIME_THREADS")) {
        long value = std::strtol(env, nullptr, 10);
        if (value > 0) {
            return static_cast<std::size_t>(value);
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body)
{
    const std::size_t threads = std::min(worker_count(), n);
    if (inside_worker || threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&] {
        inside_worker = true;
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
        inside_worker = false;
    };

    std::vector<std::jthread> pool;
    pool.reserve(threads - 1);
    for (std::size_t t = 1; t < threads; ++t) {
        pool.emplace_back(work);
    }
    work();
    pool.clear();

    if (failure) {
        std::rethrow_exception(failure);
    }
}

} // namespace buildtime
