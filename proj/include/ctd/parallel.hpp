#pragma once

#include <cstddef>
#include <functional>

namespace ctd {

/// Worker count from the CTD_NUM_THREADS environment variable (default 1).
std::size_t thread_count();

/// Splits [0, n) into contiguous chunks, one per worker, and runs
/// fn(begin, end, worker) on each. Chunk boundaries depend only on n and the
/// worker count, so per-worker results merged in worker order are reproducible.
void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

}  // namespace ctd
