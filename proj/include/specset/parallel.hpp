#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace specset {

/// Worker count resolution order: explicit argument > SPECSET_THREADS env > hardware.
int default_thread_count();

/// Set the process-wide worker cap (0 = revert to env/hardware default).
void set_thread_count(int n);

/// Runs fn(i) for i in [0, n). Work is claimed in fixed-size index chunks so
/// results written by index are identical regardless of worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace specset
