#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace quickdetect {

// Worker count for `requested` (0 = hardware concurrency). The environment
// variable QUICKDETECT_THREADS, when set to a positive integer, caps it.
unsigned resolve_thread_count(unsigned requested);

// Evaluates fn(i) for i in [0, count) on a pool of workers and returns the
// results indexed by i. Each call must depend only on i (replication seeds
// come from replication_seed(master, i)), so the output is identical for any
// thread count.
template <class T, class Fn>
std::vector<T> run_replications(std::size_t count, unsigned threads, Fn&& fn) {
  std::vector<T> results(count);
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(resolve_thread_count(threads), std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) results[i] = fn(i);
    return results;
  }

  constexpr std::size_t kChunk = 64;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        try {
          for (;;) {
            const std::size_t begin = next.fetch_add(kChunk);
            if (begin >= count) return;
            const std::size_t end = std::min(count, begin + kChunk);
            for (std::size_t i = begin; i < end; ++i) results[i] = fn(i);
          }
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next.store(count);
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

// Mean and unbiased variance accumulated in the order values are added.
class SampleSummary {
 public:
  void add(double x) noexcept {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }

  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double std_error() const noexcept;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace quickdetect
