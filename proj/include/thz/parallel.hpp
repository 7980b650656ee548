#pragma once

#include <cstddef>
#include <functional>

namespace thz {

/// Worker count used when a caller passes 0: THZ_WORKERS if set, else hardware concurrency.
unsigned default_workers();

/// Runs fn(i) for i in [0, count) on up to `workers` threads (0 = default).
/// Each index is processed exactly once; callers write results into per-index
/// slots, so output never depends on scheduling. The first exception thrown is rethrown.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn);

} // namespace thz
