#ifndef WEALTHLAB_CORE_PARALLEL_HPP
#define WEALTHLAB_CORE_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace wealthlab {

// Worker count resolution: explicit override (tests) > WEALTHLAB_WORKERS env
// > hardware concurrency. Always >= 1.
int worker_count();
void set_worker_override(int workers);  // 0 clears the override

// Runs fn(begin, end) over disjoint chunks of [0, n). Each index is handled
// exactly once; chunk boundaries must not affect results (callers write to
// per-index slots only). Runs inline when n is small or one worker resolves.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace wealthlab

#endif
