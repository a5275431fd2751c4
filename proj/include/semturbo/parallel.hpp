#ifndef SEMTURBO_PARALLEL_HPP
#define SEMTURBO_PARALLEL_HPP

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace semturbo::parallel {

// requested == 0 means hardware concurrency; SEMANTIC_TURBO_THREADS caps
// the result either way.
inline int worker_count(int requested) {
    int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (const char* cap = std::getenv("SEMANTIC_TURBO_THREADS")) {
        const int c = std::atoi(cap);
        if (c >= 1 && c < n) n = c;
    }
    return n;
}

// Runs fn(i) for i in [0, count). Each index writes only its own output
// slot, so results are identical for any worker count.
template <typename Fn>
void for_each_index(std::size_t count, int threads, Fn&& fn) {
    const int workers = worker_count(threads);
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        try {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
            next.store(count);  // drain remaining work
        }
    };
    std::vector<std::thread> pool;
    const int spawned = static_cast<int>(std::min<std::size_t>(workers, count));
    pool.reserve(spawned);
    for (int t = 0; t < spawned; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace semturbo::parallel

#endif
