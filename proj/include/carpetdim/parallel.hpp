#pragma once

#include <cstddef>
#include <functional>

namespace carpetdim {

// Worker count: hardware concurrency, capped by CARPETDIM_THREADS when set.
unsigned worker_count();
// Overrides worker_count() for this process; 0 restores the default.
void set_worker_count(unsigned n);

// Runs fn(i) for i in [0, tasks) on up to worker_count() threads. Callers
// keep results indexed by i so the outcome does not depend on scheduling.
// The first exception thrown by a task is rethrown after all workers stop.
void parallel_for(std::size_t tasks, const std::function<void(std::size_t)>& fn);

}  // namespace carpetdim
