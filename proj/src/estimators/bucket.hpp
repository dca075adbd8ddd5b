#pragma once

#include <algorithm>
#include <cmath>

#include "cardbench/query.hpp"

namespace cardbench::detail {

// A value range [lo, hi] holding `distinct` distinct values. `discrete` ranges hold every integer
// between lo and hi (dictionary codes are dense).
struct ValueRange {
  double lo = 0.0;
  double hi = 0.0;
  double distinct = 1.0;
  bool discrete = false;

  // Fraction of the range's rows expected inside `region`, assuming uniform spread within the range.
  double fraction_in(const Region& region) const {
    if (region.empty()) return 0.0;
    if (!region.is_interval()) {
      const auto& values = region.value_set();
      const auto first = std::lower_bound(values.begin(), values.end(), lo);
      const auto last = std::upper_bound(values.begin(), values.end(), hi);
      const double hits = static_cast<double>(last - first);
      const double width = discrete ? hi - lo + 1.0 : std::max(1.0, distinct);
      return std::min(1.0, hits / width);
    }
    const Interval& iv = region.bounds();
    if (lo == hi) return iv.contains(lo) ? 1.0 : 0.0;
    if (discrete) {
      double first = std::ceil(iv.lo);
      if (iv.lo_open && first == iv.lo) first += 1.0;
      double last = std::floor(iv.hi);
      if (iv.hi_open && last == iv.hi) last -= 1.0;
      const double overlap = std::min(last, hi) - std::max(first, lo) + 1.0;
      return std::clamp(overlap / (hi - lo + 1.0), 0.0, 1.0);
    }
    if (iv.lo == iv.hi) {
      // Point lookup inside a continuous range.
      return iv.contains(iv.lo) && iv.lo >= lo && iv.lo <= hi ? 1.0 / std::max(1.0, distinct) : 0.0;
    }
    const double overlap = std::min(iv.hi, hi) - std::max(iv.lo, lo);
    if (overlap <= 0.0) return iv.contains(lo) || iv.contains(hi) ? 1.0 / std::max(1.0, distinct) : 0.0;
    return std::clamp(overlap / (hi - lo), 0.0, 1.0);
  }
};

}  // namespace cardbench::detail
