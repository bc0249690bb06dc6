#include "gjet/core/parallel.hpp"

#include <algorithm>
#include <exception>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace gjet {

unsigned worker_count()
{
    if (const char* env = std::getenv("GJET_THREADS")) {
        try {
            const long n = std::stol(env);
            if (n > 0)
                return static_cast<unsigned>(n);
        } catch (...) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body)
{
    constexpr std::size_t kMinChunk = 4096;
    const std::size_t workers =
        std::min<std::size_t>(worker_count(), (n + kMinChunk - 1) / kMinChunk);
    if (workers <= 1) {
        body(0, n);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end)
            break;
        pool.emplace_back([&body, &errors, w, begin, end] {
            try {
                body(begin, end);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    // Rethrow the failure of the lowest chunk so the reported error is deterministic.
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

}  // namespace gjet
