#pragma once

#include <cstddef>
#include <functional>

namespace robsub {

/// Worker count used by parallel_for. 0 selects hardware concurrency. The
/// ROBSUB_THREADS environment variable, when set, takes precedence.
void set_thread_count(int threads);
int thread_count();

/// Runs fn(i) for i in [0, count) over contiguous static chunks. Callers write
/// into per-index slots, so results never depend on the thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace robsub
