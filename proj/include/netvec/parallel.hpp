#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace netvec {

// Runs fn(begin, end, worker) over `threads` contiguous blocks of [0, n).
// The partition depends only on (n, threads). The first exception thrown by
// any worker is rethrown on the calling thread.
template <class Fn>
void parallel_blocks(std::size_t n, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    fn(std::size_t{0}, n, std::size_t{0});
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      const std::size_t begin = n * t / threads;
      const std::size_t end = n * (t + 1) / threads;
      workers.emplace_back([&, begin, end, t] {
        try {
          fn(begin, end, t);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace netvec
