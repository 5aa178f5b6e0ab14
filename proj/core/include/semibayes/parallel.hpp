#pragma once

#include <functional>

namespace semibayes {

// Runs fn(0..count-1) on up to `threads` workers. Tasks own their outputs
// (preallocated slots), so results are deterministic regardless of thread
// count; the first exception thrown is rethrown on the calling thread.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

int hardware_threads();

}  // namespace semibayes
