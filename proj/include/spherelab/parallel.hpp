#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "spherelab/error.hpp"
#include "spherelab/random.hpp"

namespace spherelab {

/// How a Monte Carlo run is split. Results depend on the chunk size but
/// never on the worker count: chunk c always consumes substream c of the
/// parent stream, and chunk results are merged in chunk order.
struct ParallelPlan {
  int workers = 1;
  std::uint64_t chunk_size = 1u << 14;
};

/// Runs `fn(count, rng)` over ceil(total / chunk_size) chunks and merges the
/// per-chunk accumulators in chunk order with `Acc::merge`.
template <class Acc, class ChunkFn>
Acc run_chunked(std::uint64_t total, const ParallelPlan& plan, const RandomStream& parent, ChunkFn fn) {
  if (plan.workers < 1) throw InvalidArgument("workers must be >= 1");
  if (plan.chunk_size == 0) throw InvalidArgument("chunk_size must be > 0");
  const std::uint64_t chunks = (total + plan.chunk_size - 1) / plan.chunk_size;
  std::vector<Acc> results(static_cast<std::size_t>(chunks));

  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::uint64_t c = next.fetch_add(1);
      if (c >= chunks) return;
      try {
        RandomStream rng = parent.substream(c);
        const std::uint64_t count = std::min(plan.chunk_size, total - c * plan.chunk_size);
        results[static_cast<std::size_t>(c)] = fn(count, rng);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(chunks);
        return;
      }
    }
  };

  const auto threads = static_cast<std::uint64_t>(plan.workers);
  if (threads == 1 || chunks <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(std::min(threads, chunks)));
    for (std::uint64_t i = 0; i < std::min(threads, chunks); ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  Acc total_acc{};
  for (const Acc& r : results) total_acc.merge(r);
  return total_acc;
}

/// Counter accumulator for proportion estimates.
struct HitCounter {
  std::uint64_t hits = 0;
  std::uint64_t trials = 0;
  void merge(const HitCounter& other) {
    hits += other.hits;
    trials += other.trials;
  }
};

}  // namespace spherelab
