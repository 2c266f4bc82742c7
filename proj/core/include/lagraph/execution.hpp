#pragma once

#include <cstddef>
#include <functional>

namespace lagraph {

/// Deterministic mode runs every kernel on the calling thread with a fixed
/// reduction order. It is on unless LAGRAPH_DETERMINISTIC=0 is set in the
/// environment, or until set_deterministic_mode(false) is called.
bool deterministic_mode();
void set_deterministic_mode(bool enabled);

/// Scoped override of the deterministic flag.
class DeterministicScope {
 public:
  explicit DeterministicScope(bool enabled);
  ~DeterministicScope();
  DeterministicScope(const DeterministicScope&) = delete;
  DeterministicScope& operator=(const DeterministicScope&) = delete;

 private:
  bool previous_;
};

/// Splits [begin, end) into contiguous chunks. Chunks never share an output
/// row, so the result is bit-identical to the sequential loop.
void parallel_for(std::size_t begin, std::size_t end, std::size_t min_chunk,
                  const std::function<void(std::size_t, std::size_t)>& body);

/// Keeps freed heap memory mapped between training steps (glibc only).
void configure_allocator();

}  // namespace lagraph
