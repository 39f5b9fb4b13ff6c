#pragma once

#include <functional>

#include "ncs/types.hpp"

namespace ncs {

/// Worker count: NCS_THREADS when set, hardware concurrency otherwise.
int worker_count();

namespace detail {

/// Run fn(0..count-1) across the worker pool. Callers must write results to
/// preallocated slots so the outcome is independent of scheduling. Work
/// started inside another parallel_for runs serially to avoid
/// oversubscription.
void parallel_for(Index count, const std::function<void(Index)>& fn);

/// True when the current thread is already a parallel_for worker.
bool inside_parallel_region();

}  // namespace detail
}  // namespace ncs
