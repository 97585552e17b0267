#pragma once

#include <cstdint>
#include <span>

#include "gramme/types.hpp"

namespace gramme {

/// I.i.d. standard normal features, reproducible from (rows, dim, seed).
Matd random_features(Index rows, Index dim, std::uint64_t seed);

struct Split {
  IndexVec train_idx;
  IndexVec test_idx;
  std::uint64_t seed = 0;
  double frac = 0.0;
};

/// Seeded transductive split of the labeled nodes. |train| is exactly
/// floor(frac * |labeled|); the draw is stratified per class (proportional
/// allocation with largest-remainder top-up, at least one node per class
/// whenever the budget allows) so small training budgets still cover the
/// label set. Both index lists come back sorted.
Split split_transductive(std::span<const Index> labeled_ids, std::span<const int> labels,
                         double frac, std::uint64_t seed);

}  // namespace gramme
