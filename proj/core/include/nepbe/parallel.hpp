#pragma once

#include <cstddef>
#include <functional>

namespace nepbe {

/// Worker count: hardware concurrency, capped by the NEPBE_THREADS
/// environment variable when it is set to a positive integer.
unsigned thread_count();

/// Runs body(i) for i in [0, count). Each index is visited exactly once;
/// results must be written to per-index slots so output is schedule
/// independent. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace nepbe
