#pragma once

#include <cstddef>
#include <functional>

namespace dexfit {

/// Worker count: DEXFIT_THREADS if set and positive, else hardware concurrency.
int worker_count();

/// Calls body(begin, end) over contiguous static chunks of [0, n).
/// Chunking depends only on n and the worker count, so callers that write
/// per-index results get the same output for any thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace dexfit
