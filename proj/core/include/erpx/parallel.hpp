#ifndef ERPX_PARALLEL_HPP
#define ERPX_PARALLEL_HPP

#include <cstdint>
#include <functional>

namespace erpx {

// Fixed-width fork-join executor. Tasks must be pure up to writes into
// their own output slot; with that discipline results are identical for
// any worker count.
class Executor {
 public:
  // n_threads <= 0 selects the hardware concurrency.
  explicit Executor(int n_threads = 0);

  int threads() const { return threads_; }

  // Runs fn(i) for i in [0, n). Blocks until all tasks finish. If any task
  // throws, the exception with the smallest index is rethrown.
  void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn) const;

 private:
  int threads_;
};

}  // namespace erpx

#endif
