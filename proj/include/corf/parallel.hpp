#pragma once

#include <functional>

namespace corf {

/// Runs fn(0) ... fn(n-1) on up to `threads` workers. Tasks must write to
/// disjoint outputs; results are then independent of the thread count.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

/// 0 or negative => hardware concurrency.
int resolve_thread_count(int requested);

}  // namespace corf
