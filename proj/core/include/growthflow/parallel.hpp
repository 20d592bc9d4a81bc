#pragma once

#include <cstddef>
#include <functional>

namespace growthflow {

/// Upper bound on worker threads used by data-parallel loops. 0 means
/// std::thread::hardware_concurrency().
void set_max_threads(unsigned n);
unsigned max_threads();

/// Calls body(begin, end) on disjoint chunks of [0, n). Each index is
/// visited exactly once; chunks never overlap so writes to per-index
/// slots need no synchronisation.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 64);

}  // namespace growthflow
