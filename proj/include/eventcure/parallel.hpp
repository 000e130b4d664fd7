#pragma once

#include <cstddef>
#include <functional>

namespace eventcure {

/// Worker count: EVENTCURE_THREADS when set to a positive integer, else the
/// hardware concurrency (at least 1).
std::size_t thread_budget();

/// Runs body(i) for i in [0, count) on up to `threads` threads. Each index is
/// processed exactly once; callers write results by index, so the outcome
/// does not depend on scheduling. The first exception is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, std::size_t threads = 0);

}  // namespace eventcure
