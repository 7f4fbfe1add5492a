#pragma once

#include <atomic>
#include <cstddef>
#include <memory>

#include "pecann/core.hpp"
#include "pecann/random.hpp"

namespace pecann {

// Lock-free union-find. Roots are linked by a fixed pseudo-random priority
// (a bijective hash of the id) and finds halve paths with CAS, so unite and
// find may run concurrently from any number of threads; the final partition
// equals that of any sequential order of the same unions.
class ConcurrentUnionFind {
 public:
  explicit ConcurrentUnionFind(std::size_t n) : n_(n), parent_(std::make_unique<std::atomic<PointId>[]>(n)) {
    for (std::size_t i = 0; i < n; ++i) parent_[i].store(static_cast<PointId>(i), std::memory_order_relaxed);
  }

  std::size_t size() const noexcept { return n_; }

  PointId find(PointId x) noexcept {
    PointId u = x;
    while (true) {
      PointId p = parent_[u].load(std::memory_order_acquire);
      if (p == u) return u;
      const PointId gp = parent_[p].load(std::memory_order_acquire);
      if (p != gp) parent_[u].compare_exchange_weak(p, gp, std::memory_order_acq_rel, std::memory_order_relaxed);
      u = gp;
    }
  }

  void unite(PointId a, PointId b) noexcept {
    while (true) {
      a = find(a);
      b = find(b);
      if (a == b) return;
      if (priority(a) > priority(b)) std::swap(a, b);
      PointId expected = a;
      // a may have stopped being a root since find(); retry then
      if (parent_[a].compare_exchange_strong(expected, b, std::memory_order_acq_rel, std::memory_order_relaxed)) {
        return;
      }
    }
  }

 private:
  static std::uint64_t priority(PointId x) noexcept { return mix_seed(x); }

  std::size_t n_;
  std::unique_ptr<std::atomic<PointId>[]> parent_;
};

}  // namespace pecann
