#pragma once

#include <cstddef>
#include <functional>

namespace otgeo {

/// Worker count: OTGEO_THREADS if set (>= 1), else hardware concurrency.
std::size_t thread_count();

/// Runs fn(i) for i in [0, count) across thread_count() workers. Work is
/// handed out by index, so anything written per index is independent of
/// the number of workers. fn must not throw across threads; the first
/// exception is rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace otgeo
