#pragma once

// Minimal fork-join data parallelism over index ranges.
//
// Every parallel_for call splits [begin, end) into chunks handed out from a
// shared atomic counter, so idle workers keep pulling work until the range is
// exhausted. Calls made from inside a worker run serially on that worker.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pecann {

// Global worker count used by every parallel loop. Defaults to the hardware
// concurrency. set_num_workers(0) restores the default.
void set_num_workers(std::size_t workers);
std::size_t num_workers() noexcept;

// Sets the worker count for the lifetime of the object.
class ScopedWorkers {
 public:
  explicit ScopedWorkers(std::size_t workers) : previous_(num_workers()) {
    set_num_workers(workers);
  }
  ~ScopedWorkers() { set_num_workers(previous_); }
  ScopedWorkers(const ScopedWorkers&) = delete;
  ScopedWorkers& operator=(const ScopedWorkers&) = delete;

 private:
  std::size_t previous_;
};

namespace detail {
bool& in_parallel_region() noexcept;
}

// Calls fn(i) for every i in [begin, end). The first exception thrown by any
// iteration is rethrown after all workers have joined.
template <class Fn>
void parallel_for(std::size_t begin, std::size_t end, Fn&& fn, std::size_t grain = 0) {
  if (end <= begin) return;
  const std::size_t count = end - begin;
  const std::size_t workers = std::min(num_workers(), count);
  if (workers <= 1 || detail::in_parallel_region()) {
    for (std::size_t i = begin; i < end; ++i) fn(i);
    return;
  }
  if (grain == 0) grain = std::max<std::size_t>(1, count / (workers * 8));

  std::atomic<std::size_t> next{begin};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::atomic<bool> failed{false};

  auto worker = [&] {
    detail::in_parallel_region() = true;
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t lo = next.fetch_add(grain, std::memory_order_relaxed);
      if (lo >= end) break;
      const std::size_t hi = std::min(end, lo + grain);
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
      }
    }
    detail::in_parallel_region() = false;
  };

  std::vector<std::thread> threads;
  threads.reserve(workers - 1);
  for (std::size_t t = 0; t + 1 < workers; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

// Indices i in [begin, end) with pred(i) true, in increasing order.
template <class Pred>
std::vector<std::size_t> parallel_filter(std::size_t begin, std::size_t end, Pred&& pred) {
  std::vector<std::size_t> out;
  if (end <= begin) return out;
  std::vector<char> keep(end - begin, 0);
  parallel_for(begin, end, [&](std::size_t i) { keep[i - begin] = pred(i) ? 1 : 0; });
  for (std::size_t i = begin; i < end; ++i) {
    if (keep[i - begin]) out.push_back(i);
  }
  return out;
}

// Elements of `items` satisfying pred, order preserved.
template <class T, class Pred>
std::vector<T> parallel_filter_items(const std::vector<T>& items, Pred&& pred) {
  std::vector<T> out;
  for (std::size_t i : parallel_filter(0, items.size(), [&](std::size_t i) { return pred(items[i]); })) {
    out.push_back(items[i]);
  }
  return out;
}

}  // namespace pecann
