#pragma once

#include <cstdint>
#include <functional>

namespace gir {

int hardware_threads();

/// Serial reference loop; kept as the baseline the parallel path is checked
/// against.
void serial_for(std::int64_t n, const std::function<void(std::int64_t)>& body);

/// OpenMP loop over [0, n). Work items must be independent; exceptions are
/// captured and rethrown after the region. threads <= 1 runs the serial
/// reference path.
void parallel_for(std::int64_t n, int threads, const std::function<void(std::int64_t)>& body);

}  // namespace gir
