#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rvk {

// 0 means "use every hardware thread".
inline int resolve_workers(int workers) {
  if (workers > 0) return workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(begin, end) over a contiguous partition of [0, n). A fresh worker
// team is spawned per call, mirroring a one-shot kernel launch; with a single
// worker the loop runs inline. fn must write only to disjoint index-addressed
// slots so the partition can never show in the output.
template <typename Fn>
void parallel_for(std::int64_t n, int workers, Fn&& fn) {
  if (n <= 0) return;
  const std::int64_t team =
      std::min<std::int64_t>(resolve_workers(workers), n);
  if (team <= 1) {
    fn(std::int64_t{0}, n);
    return;
  }

  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(team));
  std::exception_ptr first_error;
  std::mutex error_mutex;

  const std::int64_t chunk = (n + team - 1) / team;
  for (std::int64_t t = 0; t < team; ++t) {
    const std::int64_t begin = t * chunk;
    const std::int64_t end = std::min(begin + chunk, n);
    if (begin >= end) break;
    threads.emplace_back([&fn, &first_error, &error_mutex, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& thread : threads) thread.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace rvk
