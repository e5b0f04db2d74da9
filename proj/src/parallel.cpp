#include "sfhd/parallel.hpp"

#include <omp.h>

#include <atomic>
#include <cstdlib>

namespace sfhd {

namespace {

int initial_count() {
    int n = omp_get_max_threads();
    if (const char* env = std::getenv("SFHD_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1 && cap < n) n = cap;
    }
    return n;
}

std::atomic<int>& slot() {
    static std::atomic<int> n{initial_count()};
    return n;
}

} // namespace

int thread_count() { return slot().load(std::memory_order_relaxed); }

void set_thread_count(int n) {
    if (n >= 1) slot().store(n, std::memory_order_relaxed);
}

} // namespace sfhd
