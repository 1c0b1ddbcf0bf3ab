#pragma once

#include <functional>

namespace mode {

// Global worker count for parallel_for. 0 restores the hardware default.
void set_num_threads(int n);
int num_threads();

// Runs fn(i) for i in [begin, end). Iterations must be independent; results
// are then identical for any thread count.
void parallel_for(int begin, int end, const std::function<void(int)>& fn);

}  // namespace mode
