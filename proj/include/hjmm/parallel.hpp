#pragma once

#include <cstddef>
#include <functional>

namespace hjmm {

/// Runs fn(i) for i in [0, n) on up to `threads` workers (contiguous chunks).
/// The first exception thrown by any call is rethrown after all workers join.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

/// Worker count for a request: values below 1 mean "all hardware threads".
int resolve_threads(int requested);

}  // namespace hjmm
