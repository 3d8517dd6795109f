#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace caloric {

// Number of workers used by parallel_for. One worker (the default) keeps every
// computation bit-reproducible; more workers only split independent
// per-point work, so results do not depend on the count either.
int thread_count() noexcept;
void set_thread_count(int n) noexcept;

template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, thread_count()));
  if (workers == 1 || count < 4096) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t chunk = (count + workers - 1) / workers;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([begin, end, &fn] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
}

}  // namespace caloric
