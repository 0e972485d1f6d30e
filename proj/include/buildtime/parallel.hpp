#pragma once

#include <cstddef>
#include <functional>

namespace buildtime {

// Runs body(i) for i in [0, n) on a pool of worker threads. Results must be
// written to indexed slots; scheduling order is unspecified. Calls made from
// inside a running parallel_for execute serially on the calling thread, so
// nested ensembles inside parallel folds do not oversubscribe the machine.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// Upper bound on worker threads (defaults to hardware concurrency; the
// BUILDTIME_THREADS environment variable overrides it).
std::size_t worker_count();

} // namespace buildtime
