#pragma once

#include <cstdint>
#include <functional>

namespace striplab {

// Worker count for internal pools: `requested` if positive, else the
// STRIPLAB_THREADS environment variable, else hardware concurrency.
int resolve_workers(int requested = 0);

// Splits [0, count) into contiguous chunks and runs body(begin, end, worker)
// on up to `workers` threads. Results must not depend on the split.
void parallel_ranges(std::uint64_t count, int workers,
                     const std::function<void(std::uint64_t, std::uint64_t, int)>& body);

}  // namespace striplab
