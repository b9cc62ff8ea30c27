#pragma once

namespace histtools::detail {

// Repeated multiplication; keeps power sums bit-reproducible across libms.
inline double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

}  // namespace histtools::detail
