#include "tanirf/common.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace tanirf {

namespace {
std::atomic<int> g_thread_limit{0};  // 0 = hardware concurrency
}

int thread_limit() {
  int n = g_thread_limit.load(std::memory_order_relaxed);
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  return std::max(1, n);
}

void set_thread_limit(int n) { g_thread_limit.store(n, std::memory_order_relaxed); }

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_limit()), n);
  if (workers <= 1) {
    body(0, n);
    return;
  }
  std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t begin = w * chunk;
    std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&body, begin, end] { body(begin, end); });
  }
  for (auto& t : threads) t.join();
}

}  // namespace tanirf
