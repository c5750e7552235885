#include "specset/parallel.hpp"

#include <cstdlib>
#include <string>

namespace specset {

namespace {
int g_thread_cap = 0;
}

void set_thread_count(int n) { g_thread_cap = n > 0 ? n : 0; }

int default_thread_count() {
    if (g_thread_cap > 0) return g_thread_cap;
    if (const char* env = std::getenv("SPECSET_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    int workers = default_thread_count();
    if (workers <= 1 || n < 64) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t chunk = 64;
    std::atomic<std::size_t> next{0};
    auto body = [&]() {
        for (;;) {
            std::size_t begin = next.fetch_add(chunk);
            if (begin >= n) return;
            std::size_t end = std::min(begin + chunk, n);
            for (std::size_t i = begin; i < end; ++i) fn(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers) - 1);
    for (int t = 1; t < workers; ++t) pool.emplace_back(body);
    body();
    for (auto& th : pool) th.join();
}

}  // namespace specset
