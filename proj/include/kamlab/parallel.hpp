#pragma once

#include <cstddef>
#include <functional>

namespace kamlab {

/// Thread count resolution: explicit argument > KAMLAB_THREADS env > hardware.
int resolve_threads(int requested = 0);

/// Runs body(begin, end) over contiguous chunks of [0, n). Chunking is static,
/// so outputs written to disjoint index slots are identical for every thread
/// count. body must not touch shared mutable state.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace kamlab
