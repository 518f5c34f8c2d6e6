#pragma once

// Deterministic parallel trial execution.
//
// Trials are cut into fixed-size chunks whose boundaries depend only on the
// trial count and chunk size. Each chunk is reduced in trial order by one
// worker, and chunk results are merged in chunk order afterwards, so the
// floating-point result does not depend on the number of threads.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace isolab {

struct RunOptions {
  unsigned threads = 0;  // 0 = all hardware threads
  std::uint64_t chunk_trials = 256;
};

inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

/// Runs `trials` trials and returns one partial result per chunk, in chunk order.
///
/// `make_worker()` is called once per thread; the returned object must
/// provide `Partial operator()(std::uint64_t first, std::uint64_t last)`
/// reducing trials [first, last).
template <typename Partial, typename MakeWorker>
std::vector<Partial> run_chunked(std::uint64_t trials, const RunOptions& opts, MakeWorker&& make_worker) {
  const std::uint64_t chunk = std::max<std::uint64_t>(1, opts.chunk_trials);
  const std::uint64_t chunks = (trials + chunk - 1) / chunk;
  std::vector<Partial> results(static_cast<std::size_t>(chunks));
  if (chunks == 0) return results;

  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto body = [&] {
    try {
      auto worker = make_worker();
      for (std::uint64_t c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) {
        const std::uint64_t first = c * chunk;
        const std::uint64_t last = std::min(trials, first + chunk);
        results[static_cast<std::size_t>(c)] = worker(first, last);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(chunks);
    }
  };

  const unsigned threads = static_cast<unsigned>(std::min<std::uint64_t>(resolve_threads(opts.threads), chunks));
  if (threads <= 1) {
    body();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(body);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

/// Streaming mean/variance (Welford), mergeable with Chan's update.
struct RunningMoments {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) noexcept {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }

  void merge(const RunningMoments& o) noexcept {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(count);
    const double nb = static_cast<double>(o.count);
    const double total = na + nb;
    const double delta = o.mean - mean;
    mean += delta * nb / total;
    m2 += o.m2 + delta * delta * na * nb / total;
    count += o.count;
  }

  double variance() const noexcept { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
  double std_err() const noexcept {
    return count > 1 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
  }
};

}  // namespace isolab
