#include "parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace wellround {

int max_threads() {
  if (const char* env = std::getenv("WELLROUND_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

int slab_count(std::size_t total) {
  const std::size_t cap = static_cast<std::size_t>(max_threads());
  return static_cast<int>(std::max<std::size_t>(1, std::min(cap, total)));
}

void parallel_slabs(std::size_t total,
                    const std::function<void(std::size_t, std::size_t, int)>& fn) {
  if (total == 0) return;
  const int slabs = slab_count(total);
  if (slabs == 1) {
    fn(0, total, 0);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(slabs);
  const std::size_t chunk = (total + slabs - 1) / slabs;
  for (int s = 0; s < slabs; ++s) {
    const std::size_t begin = s * chunk;
    const std::size_t end = std::min(total, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end, s] { fn(begin, end, s); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace wellround
