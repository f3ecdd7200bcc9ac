#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace effham {

/// Worker count: min(EFFHAM_THREADS or hardware_concurrency, items).
/// Thread count never affects results; work items are independent and write
/// disjoint output slots.
inline int worker_count(int items) {
  int hw = int(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  if (const char* env = std::getenv("EFFHAM_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1) hw = cap;
  }
  return std::max(1, std::min(hw, items));
}

/// Runs fn(0..items-1), distributing items over workers via an atomic
/// counter. Exceptions propagate from the first failing item (by index).
inline void parallel_for_items(int items, const std::function<void(int)>& fn) {
  if (items <= 0) return;
  const int nw = worker_count(items);
  if (nw == 1) {
    for (int i = 0; i < items; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors;
  errors.resize(std::size_t(items));
  auto body = [&]() {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= items) return;
      try {
        fn(i);
      } catch (...) {
        errors[std::size_t(i)] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(std::size_t(nw));
  for (int t = 0; t < nw; ++t) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace effham
