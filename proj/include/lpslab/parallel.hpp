#pragma once

#include <cstddef>
#include <functional>

namespace lpslab {

/// Worker cap: LPSLAB_THREADS if set and positive, else the hardware concurrency.
unsigned worker_count();

/// Runs fn(i) for i in [0, n) on up to worker_count() threads; callers write results by index.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace lpslab
