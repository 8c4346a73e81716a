#pragma once

#include <functional>

namespace quadsim {

// Worker count from the QUADSIM_WORKERS environment variable, defaulting to
// the hardware concurrency (at least 1).
int worker_count();

// Runs fn(0..n-1) on up to `workers` threads (0 = worker_count()). Blocks
// until done; the first exception thrown by any worker is rethrown. Callers
// are responsible for making their reductions order-independent or for
// reducing outside of this call — results must not depend on worker count.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

}  // namespace quadsim
