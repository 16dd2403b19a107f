#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace rldp {

using Engine = std::mt19937_64;

/// SplitMix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of replica `index` under `base_seed`. Depends on nothing else, so a
/// replica draws the same stream whichever worker runs it.
constexpr std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index) {
  return splitmix64(splitmix64(base_seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

inline Engine make_engine(std::uint64_t base_seed, std::uint64_t index) {
  return Engine(derive_seed(base_seed, index));
}

/// Worker count: RLDP_THREADS when set, else hardware concurrency.
std::size_t default_threads();

/// Process-wide worker count used when callers pass 0.
void set_threads(std::size_t n);
std::size_t threads();

/// Runs body(i) for i in [0, n) on `workers` threads (0 = threads()).
/// Each index runs exactly once; callers write results to slot i and reduce
/// afterwards in index order.
template <class Body>
void parallel_for(std::size_t n, Body&& body, std::size_t workers = 0);

}  // namespace rldp

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace rldp {

template <class Body>
void parallel_for(std::size_t n, Body&& body, std::size_t workers) {
  if (workers == 0) workers = threads();
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        // Static striding keeps the index-to-worker map deterministic.
        for (std::size_t i = w; i < n; i += workers) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace rldp
