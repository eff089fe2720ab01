#pragma once

#include <cstddef>
#include <functional>

namespace subscat {

/// Worker count used by the library's parallel loops. 0 selects hardware concurrency.
void set_worker_count(unsigned workers);
unsigned worker_count();

/// Runs body(i) for i in [0, n). Iterations are split into contiguous chunks,
/// one per worker; the first exception raised is rethrown on the caller's thread.
/// Callers write results into per-index slots so output never depends on the
/// worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace subscat
