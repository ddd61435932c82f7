#pragma once

#include <cstddef>
#include <functional>

namespace cwnet {

/// Worker count from CWNET_THREADS (0 or unset = hardware concurrency).
std::size_t thread_count();
/// Overrides CWNET_THREADS for the rest of the process; 0 restores auto.
void set_thread_count(std::size_t n);

/// Runs body(i) for i in [0, n). Each index is handled by exactly one
/// worker, so results written per index are deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace cwnet
