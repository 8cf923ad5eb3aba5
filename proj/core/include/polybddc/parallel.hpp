#pragma once

#include <functional>

namespace polybddc {

/// Worker threads to use: POLYBDDC_THREADS if set to a positive integer,
/// otherwise the hardware concurrency (at least 1).
int worker_count();

/// Calls fn(i) for i in [0, n) on up to worker_count() threads. Each index is
/// visited exactly once; callers write results to per-index slots so the
/// outcome does not depend on scheduling. The first exception thrown by fn is
/// rethrown after all workers have joined.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace polybddc
