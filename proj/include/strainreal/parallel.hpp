#pragma once

#include <cstddef>
#include <functional>

namespace strainreal {

/// Worker count: STRAINREAL_THREADS if set and positive, else hardware
/// concurrency (at least 1).
int worker_count();

/// Runs body(i) for i in [0, n) over contiguous chunks. Each index must only
/// write its own outputs, which keeps results identical to a serial loop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace strainreal
