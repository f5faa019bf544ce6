#pragma once

#include <cstddef>
#include <functional>

namespace memvol {

/// Worker count: MEMVOL_THREADS if set and positive, else hardware concurrency.
unsigned worker_count();

/// Runs body(i) for i in [0, n) across worker_count() threads in contiguous
/// blocks. Results must be written by index; the schedule never affects
/// them. If any call throws, the exception from the lowest index is
/// rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace memvol
