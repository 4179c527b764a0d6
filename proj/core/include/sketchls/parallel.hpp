#pragma once

#include <cstddef>
#include <functional>

namespace sketchls {

/// Run fn(0), ..., fn(count - 1) over up to `threads` workers with static
/// contiguous chunking. threads <= 1 runs inline. The first exception thrown
/// by any worker is rethrown after all workers join. Workers must write only
/// to disjoint slots so results do not depend on the thread count.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

/// Number of hardware threads (>= 1).
int hardware_threads();

} // namespace sketchls
