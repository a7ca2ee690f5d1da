#pragma once

#include <cstddef>
#include <functional>

namespace itolab {

/// Worker count: `requested` if positive, else the hardware concurrency,
/// capped in both cases by the ITOLAB_WORKERS environment variable.
unsigned worker_count(unsigned requested = 0);

/// Run task(i) for i in [0, n_tasks) on up to `workers` threads. Tasks are
/// claimed dynamically; the first exception thrown is rethrown after all
/// workers stop.
void parallel_for(std::size_t n_tasks, unsigned workers, const std::function<void(std::size_t)>& task);

}  // namespace itolab
