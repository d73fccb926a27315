#pragma once

#include <cstddef>
#include <functional>

namespace blockstrat {

// Worker cap: BLOCKSTRAT_THREADS if set and positive, else hardware concurrency.
std::size_t max_threads();

// Runs job(i) for i in [0, n) on up to max_threads() workers. Each job must
// write only to its own slot so the result does not depend on scheduling.
// The first exception thrown by any job is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& job);

}  // namespace blockstrat
