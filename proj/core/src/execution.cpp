#include "lagraph/execution.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <cstring>
#include <thread>
#include <vector>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace lagraph {
namespace {

bool initial_mode() {
  const char* env = std::getenv("LAGRAPH_DETERMINISTIC");
  if (env == nullptr) return true;
  return !(std::strcmp(env, "0") == 0 || std::strcmp(env, "false") == 0 ||
           std::strcmp(env, "off") == 0);
}

std::atomic<bool>& mode_flag() {
  static std::atomic<bool> flag{initial_mode()};
  return flag;
}

}  // namespace

bool deterministic_mode() { return mode_flag().load(std::memory_order_relaxed); }

void set_deterministic_mode(bool enabled) {
  mode_flag().store(enabled, std::memory_order_relaxed);
}

DeterministicScope::DeterministicScope(bool enabled) : previous_(deterministic_mode()) {
  set_deterministic_mode(enabled);
}

DeterministicScope::~DeterministicScope() { set_deterministic_mode(previous_); }

void parallel_for(std::size_t begin, std::size_t end, std::size_t min_chunk,
                  const std::function<void(std::size_t, std::size_t)>& body) {
  if (end <= begin) return;
  const std::size_t n = end - begin;
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  if (deterministic_mode() || hw == 1 || n < 2 * std::max<std::size_t>(min_chunk, 1)) {
    body(begin, end);
    return;
  }
  const std::size_t workers = std::min(hw, n / std::max<std::size_t>(min_chunk, 1));
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t lo = begin + w * chunk;
    const std::size_t hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    threads.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
  body(begin, std::min(end, begin + chunk));
  for (auto& t : threads) t.join();
}

void configure_allocator() {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
  mallopt(M_TOP_PAD, 64 << 20);
#endif
}

}  // namespace lagraph
