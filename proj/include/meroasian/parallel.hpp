#pragma once

#include <cstddef>
#include <functional>

namespace meroasian {

// Worker count: MERO_ASIAN_THREADS when set to a positive integer, otherwise
// all hardware threads.
std::size_t worker_count();

// Runs body(i) for i in [0, n). Each index must write only its own output
// slot; reductions are left to the caller so results do not depend on the
// number of workers. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace meroasian
