#pragma once

#include <cstddef>
#include <functional>

namespace wickwz {

/// Worker count: explicit request, else WICKWZ_THREADS, else hardware
/// concurrency. Always at least 1.
int effective_threads(int requested = 0);

/// Runs fn(begin, end) over disjoint chunks of [0, n). Chunk boundaries are
/// fixed (independent of the worker count), so any per-index output is
/// deterministic; reductions must still happen afterwards in index order.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace wickwz
