#include "caloric/parallel.hpp"

#include <atomic>

namespace caloric {

namespace {
std::atomic<int> g_threads{1};
}

int thread_count() noexcept { return g_threads.load(std::memory_order_relaxed); }

void set_thread_count(int n) noexcept { g_threads.store(std::max(1, n), std::memory_order_relaxed); }

}  // namespace caloric
