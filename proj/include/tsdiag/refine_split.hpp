#pragma once

// Removal of the worst-aligned pairs and seeded random resplitting.

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tsdiag/corpus_io.hpp"

namespace tsdiag {

enum class RankingKey { NormalizedPct, RawDistance };

// Whether the drop is taken from the pooled dataset (default) or from each
// split separately before pooling.
enum class DropOrder { PoolThenDrop, DropThenPool };

struct RankedPair {
  std::string split_name;
  SentencePair pair;
  double normalized_pct = 0.0;
  std::size_t raw_distance = 0;
};

using SplitSizes = std::vector<std::pair<std::string, std::size_t>>;

struct RefinePlan {
  double drop_fraction = 0.0;  // in [0, 1)
  RankingKey ranking_key = RankingKey::NormalizedPct;
  DropOrder order = DropOrder::PoolThenDrop;
  std::uint64_t seed = 0;
  SplitSizes proportions;  // empty: scale the original split sizes
};

inline constexpr const char* kPoolSplitName = "pool";

// All pairs of all splits, worst first. Ties keep (split name, origin line)
// ascending. Throws EmptyDataset.
std::vector<RankedPair> rank_by_distance(const Dataset& dataset,
                                         RankingKey key = RankingKey::NormalizedPct);

// floor(drop_fraction * n)
std::size_t drop_count(double drop_fraction, std::size_t n);

// Removes the worst floor(drop_fraction * N) pairs and returns the rest as a
// single split named "pool", in dataset order (train, dev, test, others;
// file order within a split).
Dataset refine(const Dataset& dataset, double drop_fraction,
               RankingKey key = RankingKey::NormalizedPct,
               DropOrder order = DropOrder::PoolThenDrop);

// Shuffles `pool` with the seeded generator and cuts it into consecutive
// chunks of the given sizes, in order. Pairs get their new line index as
// origin_line. Throws SizeMismatch.
Dataset random_resplit(std::vector<SentencePair> pool, const SplitSizes& sizes,
                       std::uint64_t seed, const std::string& name = "resplit");

// Apportions `total` over the split sizes of `dataset` by largest
// remainder; ties go to the earlier split in dataset order.
SplitSizes scale_sizes(const Dataset& dataset, std::size_t total);

Dataset refine_and_resplit(const Dataset& dataset, const RefinePlan& plan);
Dataset refine_and_resplit(const Dataset& dataset, double drop_fraction,
                           std::uint64_t seed);

}  // namespace tsdiag
