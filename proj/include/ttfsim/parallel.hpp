#pragma once

#include <cstddef>
#include <functional>

namespace ttfsim {

/// Number of workers used when a caller passes threads = 0.
unsigned default_threads();

/// Runs fn(worker, begin, end) over [0, n) split into one contiguous chunk
/// per worker. Worker w always receives the w-th chunk, so per-worker
/// partial results can be reduced in a deterministic order.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

}  // namespace ttfsim
