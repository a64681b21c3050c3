#pragma once

// Order-preserving parallel map over an index range. Results land in their
// index slot, so output never depends on the thread count or scheduling.

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <type_traits>
#include <vector>

namespace casimir {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

template <class F>
auto parallel_map(int count, int threads, F&& fn) -> std::vector<std::invoke_result_t<F&, int>> {
  using R = std::invoke_result_t<F&, int>;
  std::vector<std::optional<R>> slots(static_cast<std::size_t>(std::max(count, 0)));
  const int workers = std::min(resolve_threads(threads), std::max(count, 1));

  if (workers <= 1) {
    for (int i = 0; i < count; ++i) slots[i].emplace(fn(i));
  } else {
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    int first_error_index = count;
    std::mutex error_mutex;
    auto worker = [&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          slots[i].emplace(fn(i));
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (i < first_error_index) {
            first_error_index = i;
            first_error = std::current_exception();
          }
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  std::vector<R> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace casimir
