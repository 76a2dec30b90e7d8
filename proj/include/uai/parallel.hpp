#pragma once

#include <cstddef>
#include <functional>

namespace uai {

// Worker count: UAI_THREADS caps it, hardware concurrency is the default.
unsigned effective_threads();

// Run fn(0..n-1), possibly on several threads.  Work items must be
// independent; results should land in preallocated slots so the output is
// deterministic regardless of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace uai
