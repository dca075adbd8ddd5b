#pragma once

#include <cstdint>

#include "cardbench/catalog.hpp"

namespace cardbench {

struct SyntheticOptions {
  uint64_t seed = 0;
  double scale = 1.0;  // row-count multiplier; 1.0 keeps every table at or below 10^4 rows
  double skew = 1.1;   // Zipf exponent of foreign-key popularity
};

// Eight-table Q&A-site catalog (users, posts, comments, votes, badges, post_history, post_links,
// tags) with Zipf-skewed foreign keys, correlated attributes, nulls, and twelve join edges, one of
// them foreign-key to foreign-key.
Catalog make_stats_like_catalog(const SyntheticOptions& options = {});

}  // namespace cardbench
