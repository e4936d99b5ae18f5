#pragma once

#include <cstddef>
#include <functional>

namespace mopp {

/// Worker count: MO_PP_THREADS when set and positive, otherwise the
/// hardware concurrency (MO_PP_THREADS=0 also means auto).
std::size_t thread_budget();

/// Runs fn(0) .. fn(count - 1) on the thread budget. Each index must write
/// only to its own output slot; results are then independent of scheduling.
/// The first exception thrown by any task is rethrown on the caller.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace mopp
