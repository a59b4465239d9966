#pragma once

#include <cstddef>
#include <functional>

namespace quditfuse {

/// Worker count: QUDITFUSE_THREADS when set to a positive integer,
/// otherwise the hardware concurrency (at least 1).
int default_thread_count();

/// Runs body(i) for i in [0, n) on up to `threads` workers (0 means
/// default_thread_count()). Work is split into contiguous blocks, so results
/// written by index do not depend on scheduling. If any call throws, the
/// exception from the lowest failing index is rethrown after all workers join.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace quditfuse
