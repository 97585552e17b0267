#include "gramme/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "gramme/rng.hpp"

namespace gramme {

Matd random_features(Index rows, Index dim, std::uint64_t seed) {
  if (rows <= 0 || dim <= 0) throw DataError("random_features: rows and dim must be positive");
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matd f(rows, dim);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < dim; ++j) f(i, j) = normal(eng);
  }
  return f;
}

Split split_transductive(std::span<const Index> labeled_ids, std::span<const int> labels,
                         double frac, std::uint64_t seed) {
  if (!(frac > 0.0 && frac < 1.0))
    throw DataError("split fraction must lie in (0, 1), got " + std::to_string(frac));
  if (labeled_ids.empty()) throw DataError("split needs at least one labeled node");

  // Class buckets in label order, each shuffled independently.
  std::map<int, IndexVec> buckets;
  for (Index v : labeled_ids) {
    const int lbl = labels[v];
    if (lbl < 0) throw DataError("split: node " + std::to_string(v) + " is unlabeled");
    buckets[lbl].push_back(v);
  }
  Rng rng(seed);
  for (auto& [lbl, bucket] : buckets) rng.shuffle(bucket);

  const std::size_t target =
      static_cast<std::size_t>(std::floor(frac * static_cast<double>(labeled_ids.size())));
  const std::size_t n_classes = buckets.size();

  // Proportional allocation, floor per class.
  struct Alloc {
    int label;
    std::size_t take;
    std::size_t size;
    double remainder;
  };
  std::vector<Alloc> alloc;
  std::size_t assigned = 0;
  for (auto& [lbl, bucket] : buckets) {
    const double exact = frac * static_cast<double>(bucket.size());
    std::size_t take = static_cast<std::size_t>(std::floor(exact));
    take = std::min(take, bucket.size());
    alloc.push_back({lbl, take, bucket.size(), exact - std::floor(exact)});
    assigned += take;
  }

  // Cover every class when the budget allows it.
  if (target >= n_classes) {
    for (Alloc& a : alloc) {
      if (a.take == 0 && a.size > 0) {
        ++a.take;
        ++assigned;
      }
    }
  }

  // Largest-remainder top-up, or trim from the most-allocated classes.
  while (assigned < target) {
    Alloc* best = nullptr;
    for (Alloc& a : alloc) {
      if (a.take >= a.size) continue;
      if (!best || a.remainder > best->remainder ||
          (a.remainder == best->remainder && a.label < best->label))
        best = &a;
    }
    if (!best) break;  // every class exhausted; target unreachable
    ++best->take;
    best->remainder -= 1.0;
    ++assigned;
  }
  while (assigned > target) {
    Alloc* worst = nullptr;
    const std::size_t floor_take = (target >= n_classes) ? 1 : 0;
    for (Alloc& a : alloc) {
      if (a.take <= floor_take) continue;
      if (!worst || a.take > worst->take || (a.take == worst->take && a.label > worst->label))
        worst = &a;
    }
    if (!worst) {
      for (Alloc& a : alloc) {
        if (a.take > 0 && (!worst || a.take > worst->take)) worst = &a;
      }
    }
    --worst->take;
    --assigned;
  }

  Split split;
  split.seed = seed;
  split.frac = frac;
  for (const Alloc& a : alloc) {
    const IndexVec& bucket = buckets.at(a.label);
    for (std::size_t i = 0; i < bucket.size(); ++i) {
      (i < a.take ? split.train_idx : split.test_idx).push_back(bucket[i]);
    }
  }
  std::sort(split.train_idx.begin(), split.train_idx.end());
  std::sort(split.test_idx.begin(), split.test_idx.end());
  return split;
}

}  // namespace gramme
