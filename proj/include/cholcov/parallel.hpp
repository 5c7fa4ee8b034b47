#ifndef CHOLCOV_PARALLEL_HPP
#define CHOLCOV_PARALLEL_HPP

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace cholcov {

/// Runs fn(i) for i in [0, count) on up to n_threads workers.
///
/// Workers own contiguous index blocks and must write only to slots indexed by
/// i, so results are identical for any thread count. The first exception
/// thrown by a worker is rethrown on the caller.
template <typename Fn>
void parallel_for(int count, int n_threads, Fn&& fn) {
  n_threads = std::max(1, n_threads);
  if (n_threads == 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  n_threads = std::min(n_threads, count);
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_threads));
  const int block = (count + n_threads - 1) / n_threads;
  for (int t = 0; t < n_threads; ++t) {
    const int lo = t * block;
    const int hi = std::min(count, lo + block);
    if (lo >= hi) break;
    workers.emplace_back([&, t, lo, hi] {
      try {
        for (int i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace cholcov

#endif  // CHOLCOV_PARALLEL_HPP
