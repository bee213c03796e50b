#pragma once

#include <cstddef>
#include <functional>

namespace wishart {

/// Worker count: WISHART_THREADS if set to a positive integer, otherwise
/// std::thread::hardware_concurrency() (at least 1).
unsigned thread_count();

/// Runs body(i) for i in [0, count) on up to thread_count() threads using
/// static contiguous chunks. Each index is processed exactly once, so any
/// result written to slot i is independent of the thread layout. The first
/// exception thrown by a worker is rethrown on the calling thread. Calls made
/// from inside a worker run serially.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace wishart
