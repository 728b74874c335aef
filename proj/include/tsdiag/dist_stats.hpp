#pragma once

// Change-percentage histograms, KL divergence between splits, and the
// randomized permutation test for split randomness.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tsdiag/corpus_io.hpp"

namespace tsdiag {

inline constexpr std::size_t kDefaultBins = 50;
inline constexpr double kDefaultSmoothing = 0.5;
inline constexpr double kDefaultAlpha = 0.05;
inline constexpr std::uint64_t kDefaultSeed = 20210419;

struct SplitHistogram {
  std::vector<double> bin_edges;     // bins + 1 edges over [0, 100]
  std::vector<std::size_t> counts;   // bins
  std::vector<double> mass;          // counts / n
  std::size_t n = 0;

  std::size_t bins() const noexcept { return counts.size(); }
};

struct KLResult {
  double value = 0.0;  // nats
  std::size_t bins = 0;
  double smoothing = 0.0;
  std::string p_name;
  std::string q_name;
};

struct PermTestOptions {
  std::size_t iterations = 100000;
  std::uint64_t seed = kDefaultSeed;
  std::size_t bins = kDefaultBins;
  double smoothing = kDefaultSmoothing;
};

struct PermTestResult {
  double observed_kl = 0.0;
  std::size_t iterations = 0;
  std::size_t count_geq = 0;
  double p_value = 0.0;  // count_geq / iterations
  std::uint64_t seed = 0;
  std::size_t bins = 0;
  double smoothing = 0.0;
  double max_permuted_kl = 0.0;

  friend bool operator==(const PermTestResult&, const PermTestResult&) = default;
};

// Equal-width bin of `value` among `bins` bins over [0, 100]; 100 lands in
// the last bin. Throws OutOfRangeValue.
std::size_t bin_index(double value, std::size_t bins);

// Throws EmptyInput and OutOfRangeValue.
SplitHistogram histogram(std::span<const double> values, std::size_t bins);

// KL(P || Q) in nats after adding `smoothing` to every bin of both count
// vectors. Infinite when some Q bin is empty while the P bin is not.
double kl_from_counts(std::span<const std::size_t> p_counts, std::size_t p_total,
                      std::span<const std::size_t> q_counts, std::size_t q_total,
                      double smoothing);

// Throws BinMismatch when the bin edges differ.
KLResult kl_divergence(const SplitHistogram& p, const SplitHistogram& q,
                       double smoothing);

// KL(reference || other) of change-percentage histograms for each other
// split. Throws UnknownSplit and EmptySplit.
std::vector<KLResult> split_divergence(const Dataset& dataset,
                                       const std::string& reference_split,
                                       const std::vector<std::string>& other_splits,
                                       std::size_t bins = kDefaultBins,
                                       double smoothing = kDefaultSmoothing);

// Pools a and b, then for each iteration shuffles the pool with the stream
// derived from (seed, iteration), re-splits it into sizes (|a|, |b|) and
// counts permuted KL >= observed KL. Iterations run in parallel; the result
// does not depend on the thread count. Throws EmptyInput.
PermTestResult permutation_test(std::span<const double> values_a,
                                std::span<const double> values_b,
                                const PermTestOptions& options = {});

// Single-threaded reference that rebuilds both histograms from the shuffled
// values on every iteration. Must agree exactly with permutation_test.
PermTestResult permutation_test_serial(std::span<const double> values_a,
                                       std::span<const double> values_b,
                                       const PermTestOptions& options = {});

// True when the randomness hypothesis is rejected, i.e. p_value < alpha.
bool decide_null(const PermTestResult& result, double alpha = kDefaultAlpha);

// Paired sign-flip permutation test on per-item score differences a_i - b_i
// with |mean difference| as the statistic.
struct PairedPermResult {
  double mean_a = 0.0;
  double mean_b = 0.0;
  double observed = 0.0;  // |mean_a - mean_b|
  std::size_t iterations = 0;
  std::size_t count_geq = 0;
  double p_value = 0.0;
  std::uint64_t seed = 0;

  friend bool operator==(const PairedPermResult&, const PairedPermResult&) = default;
};

// Throws EmptyInput and LengthMismatch.
PairedPermResult paired_permutation_test(std::span<const double> scores_a,
                                         std::span<const double> scores_b,
                                         std::size_t iterations, std::uint64_t seed);
PairedPermResult paired_permutation_test_serial(std::span<const double> scores_a,
                                                std::span<const double> scores_b,
                                                std::size_t iterations,
                                                std::uint64_t seed);

// CSV with header bin_left,bin_right,count,mass.
void write_histogram_csv(std::ostream& out, const SplitHistogram& hist);

}  // namespace tsdiag
