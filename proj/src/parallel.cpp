#include "pecann/parallel.hpp"

namespace pecann {

namespace {
std::size_t default_workers() noexcept {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

std::atomic<std::size_t> g_workers{0};
}  // namespace

void set_num_workers(std::size_t workers) { g_workers.store(workers); }

std::size_t num_workers() noexcept {
  const std::size_t w = g_workers.load();
  return w == 0 ? default_workers() : w;
}

namespace detail {
bool& in_parallel_region() noexcept {
  thread_local bool flag = false;
  return flag;
}
}  // namespace detail

}  // namespace pecann
