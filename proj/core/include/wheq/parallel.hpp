#pragma once

#include <cstddef>
#include <functional>

namespace wheq {

// Worker count used by sweeps: WHEQ_WORKERS if set, hardware concurrency
// otherwise. Results never depend on the count; it only sets throughput.
int worker_count_from_env();

// Runs f(i) for i in [0,n). Work items must be independent; each index is
// executed exactly once. With workers <= 1 this is a plain loop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f, int workers);

} // namespace wheq
