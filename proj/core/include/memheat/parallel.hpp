#pragma once

#include <cstddef>
#include <functional>

namespace memheat {

/// Threads for `tasks` independent jobs: hardware concurrency, capped by the
/// MEMHEAT_THREADS environment variable when set to a positive integer.
std::size_t worker_count(std::size_t tasks);

/// Runs fn(0) ... fn(n-1) on worker_count(n) threads. Each index runs exactly
/// once; the first exception (lowest index) is rethrown after all finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace memheat
