#pragma once

#include <cstddef>
#include <functional>

namespace wellround {

// Worker cap: WELLROUND_THREADS if set, else hardware concurrency.
int max_threads();

// Number of contiguous slabs used for `total` work items.
int slab_count(std::size_t total);

// Runs fn(begin, end, slab_index) over contiguous slabs covering [0, total).
// Slab boundaries depend only on `total` and the thread cap, so per-slab
// results can be merged deterministically in slab order.
void parallel_slabs(std::size_t total,
                    const std::function<void(std::size_t, std::size_t, int)>& fn);

}  // namespace wellround
