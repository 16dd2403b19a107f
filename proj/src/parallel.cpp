#include "rldp/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace rldp {

namespace {
std::atomic<std::size_t> g_threads{0};
}

std::size_t default_threads() {
  if (const char* env = std::getenv("RLDP_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (...) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void set_threads(std::size_t n) { g_threads = n; }

std::size_t threads() {
  const std::size_t n = g_threads.load();
  return n == 0 ? default_threads() : n;
}

}  // namespace rldp
