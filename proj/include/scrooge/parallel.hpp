#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace scrooge {

/// Worker cap. Zero means "use default_threads()". Results never depend on
/// the value: work is split into fixed shards, each with its own stream, and
/// reduced in shard order.
struct Parallelism {
  unsigned threads = 0;

  unsigned resolved() const;
};

/// SCROOGE_THREADS if set and positive, otherwise 1.
unsigned default_threads();

/// Runs fn(i) for i in [0, count) on up to `par` worker threads.
/// The first exception thrown by any task is rethrown on the caller.
template <class Fn>
void parallel_for(std::size_t count, Parallelism par, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(par.resolved(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace scrooge
