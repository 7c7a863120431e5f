#pragma once

#include <cstdint>

namespace xsched {

// All times and durations are integer microseconds. Planners and the
// simulator never leave the microsecond grid, so comparisons are exact and
// every serialized artifact is bit-reproducible.
using Micros = std::int64_t;

}  // namespace xsched
