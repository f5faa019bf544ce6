#include "memvol/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace memvol {

unsigned worker_count() {
    if (const char* env = std::getenv("MEMVOL_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    if (n == 0) return;
    const std::size_t workers = std::min<std::size_t>(worker_count(), n);
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }

    struct Failure {
        std::size_t index = static_cast<std::size_t>(-1);
        std::exception_ptr error;
    };
    std::vector<Failure> failures(workers);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    const std::size_t block = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            const std::size_t lo = w * block;
            const std::size_t hi = std::min(n, lo + block);
            for (std::size_t i = lo; i < hi; ++i) {
                try {
                    body(i);
                } catch (...) {
                    failures[w] = {i, std::current_exception()};
                    return;
                }
            }
        });
    }
    for (auto& t : threads) t.join();
    for (const auto& f : failures)
        if (f.error) std::rethrow_exception(f.error);
}

} // namespace memvol
