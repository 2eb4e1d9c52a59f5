#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dstft {

/// Controls worker parallelism inside library calls.
///
/// With `deterministic` set, every reduction is performed in a fixed order
/// that does not depend on `threads`, so results are bitwise reproducible.
struct Execution {
  unsigned threads = 1;
  bool deterministic = true;
};

namespace detail {

// Runs fn(begin, end, worker) over [0, count) split into contiguous blocks.
template <class Fn>
void parallel_blocks(std::size_t count, unsigned threads, Fn&& fn) {
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(threads, count));
  if (workers <= 1) {
    fn(std::size_t{0}, count, 0u);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(count, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back([&, begin, end, w] {
        try {
          fn(begin, end, static_cast<unsigned>(w));
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail
}  // namespace dstft
