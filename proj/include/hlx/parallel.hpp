#pragma once

#include <cstddef>
#include <functional>

namespace hlx {

// Worker count: HLX_THREADS if set, else hardware concurrency.
int thread_count();

// Calls body(begin, end) on disjoint contiguous chunks of [0, n).
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace hlx
