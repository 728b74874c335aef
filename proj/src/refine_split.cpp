#include "tsdiag/refine_split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tsdiag/edit_ops.hpp"
#include "tsdiag/error.hpp"
#include "tsdiag/rng.hpp"

namespace tsdiag {

std::vector<RankedPair> rank_by_distance(const Dataset& dataset, RankingKey key) {
  if (dataset.total_pairs() == 0)
    throw Error(ErrorCode::EmptyDataset, "dataset '" + dataset.name + "' has no pairs");
  std::vector<RankedPair> ranked;
  ranked.reserve(dataset.total_pairs());
  // std::map iterates split names ascending, which gives the tie order.
  for (const auto& [split_name, split] : dataset.splits) {
    if (split.empty()) continue;
    auto profiles = profile_split(split);
    for (std::size_t i = 0; i < split.size(); ++i)
      ranked.push_back({split_name, split.pairs[i], profiles[i].normalized_pct,
                        profiles[i].raw_distance});
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [key](const RankedPair& a, const RankedPair& b) {
                     if (key == RankingKey::RawDistance) {
                       if (a.raw_distance != b.raw_distance)
                         return a.raw_distance > b.raw_distance;
                     } else if (a.normalized_pct != b.normalized_pct) {
                       return a.normalized_pct > b.normalized_pct;
                     }
                     if (a.split_name != b.split_name) return a.split_name < b.split_name;
                     return a.pair.origin_line < b.pair.origin_line;
                   });
  return ranked;
}

std::size_t drop_count(double drop_fraction, std::size_t n) {
  if (!(drop_fraction >= 0.0 && drop_fraction < 1.0))
    throw Error(ErrorCode::InvalidArgument, "drop fraction must lie in [0, 1)");
  return static_cast<std::size_t>(std::floor(drop_fraction * static_cast<double>(n)));
}

namespace {

struct PairKey {
  std::string split;
  std::size_t line;
  friend auto operator<=>(const PairKey&, const PairKey&) = default;
};

// Pairs of `dataset` in dataset order, skipping `dropped`.
std::vector<SentencePair> pooled_except(const Dataset& dataset,
                                        const std::vector<PairKey>& dropped) {
  std::vector<PairKey> sorted = dropped;
  std::sort(sorted.begin(), sorted.end());
  std::vector<SentencePair> pool;
  for (const auto& split_name : dataset.ordered_split_names())
    for (const auto& pair : dataset.split(split_name).pairs)
      if (!std::binary_search(sorted.begin(), sorted.end(),
                              PairKey{split_name, pair.origin_line}))
        pool.push_back(pair);
  return pool;
}

}  // namespace

Dataset refine(const Dataset& dataset, double drop_fraction, RankingKey key,
               DropOrder order) {
  std::vector<PairKey> dropped;
  if (order == DropOrder::PoolThenDrop) {
    auto ranked = rank_by_distance(dataset, key);
    const std::size_t k = drop_count(drop_fraction, ranked.size());
    for (std::size_t i = 0; i < k; ++i)
      dropped.push_back({ranked[i].split_name, ranked[i].pair.origin_line});
  } else {
    if (dataset.total_pairs() == 0)
      throw Error(ErrorCode::EmptyDataset, "dataset '" + dataset.name + "' has no pairs");
    for (const auto& [split_name, split] : dataset.splits) {
      if (split.empty()) continue;
      Dataset single{dataset.name, {}};
      single.add_split(split);
      auto ranked = rank_by_distance(single, key);
      const std::size_t k = drop_count(drop_fraction, ranked.size());
      for (std::size_t i = 0; i < k; ++i)
        dropped.push_back({split_name, ranked[i].pair.origin_line});
    }
  }
  Dataset out{dataset.name, {}};
  out.add_split({kPoolSplitName, pooled_except(dataset, dropped)});
  return out;
}

Dataset random_resplit(std::vector<SentencePair> pool, const SplitSizes& sizes,
                       std::uint64_t seed, const std::string& name) {
  std::size_t total = 0;
  for (const auto& [split_name, size] : sizes) {
    if (size < 1)
      throw Error(ErrorCode::SizeMismatch, "split '" + split_name + "' would be empty");
    total += size;
  }
  if (total != pool.size())
    throw Error(ErrorCode::SizeMismatch,
                "split sizes sum to " + std::to_string(total) + " but the pool has " +
                    std::to_string(pool.size()) + " pairs");

  rng::Xoshiro256 gen(seed);
  rng::shuffle(std::span<SentencePair>(pool), gen);

  Dataset out{name, {}};
  std::size_t next = 0;
  for (const auto& [split_name, size] : sizes) {
    Split split{split_name, {}};
    split.pairs.reserve(size);
    for (std::size_t i = 0; i < size; ++i) {
      SentencePair pair = std::move(pool[next++]);
      pair.origin_line = i;
      split.pairs.push_back(std::move(pair));
    }
    if (out.has_split(split_name))
      throw Error(ErrorCode::SizeMismatch, "split '" + split_name + "' listed twice");
    out.add_split(std::move(split));
  }
  return out;
}

SplitSizes scale_sizes(const Dataset& dataset, std::size_t total) {
  const auto names = dataset.ordered_split_names();
  const std::size_t original = dataset.total_pairs();
  if (original == 0)
    throw Error(ErrorCode::EmptyDataset, "dataset '" + dataset.name + "' has no pairs");

  SplitSizes sizes;
  std::vector<std::pair<std::size_t, std::size_t>> remainders;  // (numerator rest, index)
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < names.size(); ++i) {
    // Exact integer quota: total * size / original.
    const std::size_t numerator = total * dataset.split(names[i]).size();
    sizes.emplace_back(names[i], numerator / original);
    remainders.emplace_back(numerator % original, i);
    assigned += numerator / original;
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned)
    ++sizes[remainders[k].second].second;
  return sizes;
}

Dataset refine_and_resplit(const Dataset& dataset, const RefinePlan& plan) {
  Dataset refined = refine(dataset, plan.drop_fraction, plan.ranking_key, plan.order);
  auto pool = std::move(refined.splits.at(kPoolSplitName).pairs);
  SplitSizes sizes = plan.proportions.empty() ? scale_sizes(dataset, pool.size())
                                              : plan.proportions;
  return random_resplit(std::move(pool), sizes, plan.seed, dataset.name);
}

Dataset refine_and_resplit(const Dataset& dataset, double drop_fraction,
                           std::uint64_t seed) {
  RefinePlan plan;
  plan.drop_fraction = drop_fraction;
  plan.seed = seed;
  return refine_and_resplit(dataset, plan);
}

}  // namespace tsdiag
