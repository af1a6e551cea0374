#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <optional>
#include <thread>
#include <vector>

namespace gapforge {

// Applies `fn(i)` for i in [0, n) with at most `max_in_flight` concurrent
// calls. Results come back indexed by i regardless of completion order. If
// any call throws, the exception of the lowest failing index is rethrown
// after all workers have stopped.
template <typename Fn>
auto bounded_parallel_map(std::size_t n, std::size_t max_in_flight, Fn fn)
    -> std::vector<decltype(fn(std::size_t{}))> {
  using Result = decltype(fn(std::size_t{}));
  std::vector<std::optional<Result>> slots(n);
  std::vector<std::exception_ptr> errors(n);

  const std::size_t workers = std::max<std::size_t>(1, std::min(max_in_flight, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        while (!failed.load(std::memory_order_relaxed)) {
          const std::size_t i = next.fetch_add(1);
          if (i >= n) return;
          try {
            slots[i].emplace(fn(i));
          } catch (...) {
            errors[i] = std::current_exception();
            failed.store(true);
          }
        }
      });
    }
  }

  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<Result> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace gapforge
