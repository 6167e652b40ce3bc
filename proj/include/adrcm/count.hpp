#pragma once

#include <cstdint>

#include "adrcm/error.hpp"

namespace adrcm {

// Exact subgraph counts. Arithmetic on counts is overflow-checked: an
// overflow raises OverflowError instead of wrapping.
using Count = std::uint64_t;

inline Count checked_add(Count a, Count b) {
  Count r = 0;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("count exceeds 64 bits");
  return r;
}

inline Count checked_mul(Count a, Count b) {
  Count r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("count exceeds 64 bits");
  return r;
}

}  // namespace adrcm
