#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace squidharm {

enum class Execution { serial, parallel };

// Number of worker threads used by Execution::parallel (0 = runtime default).
void set_thread_count(int threads);
int thread_count();

// Maps `fn` over [0, n). Results are assembled in index order regardless of the
// schedule, so both policies return identical vectors for pure `fn`. The first
// exception (lowest index) thrown by any work item is rethrown after the loop.
template <typename Fn>
auto indexed_map(std::size_t n, Fn&& fn, Execution policy = Execution::parallel)
    -> std::vector<decltype(fn(std::size_t{}))> {
  using Result = decltype(fn(std::size_t{}));
  std::vector<std::optional<Result>> slots(n);
  std::exception_ptr first_error;
  std::size_t first_error_index = n;

  if (policy == Execution::serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) slots[i].emplace(fn(i));
  } else {
    std::mutex error_mutex;
    const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(thread_count())
    for (long i = 0; i < count; ++i) {
      try {
        slots[static_cast<std::size_t>(i)].emplace(fn(static_cast<std::size_t>(i)));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (static_cast<std::size_t>(i) < first_error_index) {
          first_error_index = static_cast<std::size_t>(i);
          first_error = std::current_exception();
        }
      }
    }
    if (first_error) std::rethrow_exception(first_error);
  }

  std::vector<Result> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace squidharm
