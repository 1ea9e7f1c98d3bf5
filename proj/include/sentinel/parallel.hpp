#pragma once

#include <cstddef>
#include <functional>

namespace sentinel {

// Worker count: REPLY_SENTINEL_THREADS if set and positive, else the hardware
// concurrency (at least 1).
std::size_t thread_count();

// Runs body(i) for i in [0, n) on up to thread_count() threads. Work items must
// write to disjoint outputs. If any item throws, the exception from the lowest
// failing index is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace sentinel
