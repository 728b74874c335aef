#include "tsdiag/dist_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "tsdiag/edit_ops.hpp"
#include "tsdiag/error.hpp"
#include "tsdiag/rng.hpp"

namespace tsdiag {

std::size_t bin_index(double value, std::size_t bins) {
  if (!(value >= 0.0 && value <= 100.0))
    throw Error(ErrorCode::OutOfRangeValue,
                "value " + format_double(value) + " outside [0, 100]");
  auto idx = static_cast<std::size_t>(value * static_cast<double>(bins) / 100.0);
  return std::min(idx, bins - 1);
}

namespace {

void check_bins(std::size_t bins) {
  if (bins < 1) throw Error(ErrorCode::InvalidArgument, "bin count must be >= 1");
}

std::vector<double> make_edges(std::size_t bins) {
  std::vector<double> edges(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i)
    edges[i] = 100.0 * static_cast<double>(i) / static_cast<double>(bins);
  return edges;
}

}  // namespace

SplitHistogram histogram(std::span<const double> values, std::size_t bins) {
  check_bins(bins);
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "histogram of no values");
  SplitHistogram h;
  h.bin_edges = make_edges(bins);
  h.counts.assign(bins, 0);
  for (double v : values) ++h.counts[bin_index(v, bins)];
  h.n = values.size();
  h.mass.resize(bins);
  for (std::size_t i = 0; i < bins; ++i)
    h.mass[i] = static_cast<double>(h.counts[i]) / static_cast<double>(h.n);
  return h;
}

double kl_from_counts(std::span<const std::size_t> p_counts, std::size_t p_total,
                      std::span<const std::size_t> q_counts, std::size_t q_total,
                      double smoothing) {
  const auto bins = static_cast<double>(p_counts.size());
  const double p_norm = static_cast<double>(p_total) + bins * smoothing;
  const double q_norm = static_cast<double>(q_total) + bins * smoothing;
  double kl = 0.0;
  for (std::size_t i = 0; i < p_counts.size(); ++i) {
    const double p = (static_cast<double>(p_counts[i]) + smoothing) / p_norm;
    if (p <= 0.0) continue;
    const double q = (static_cast<double>(q_counts[i]) + smoothing) / q_norm;
    if (q <= 0.0) return std::numeric_limits<double>::infinity();
    kl += p * std::log(p / q);
  }
  // Rounding can leave a tiny negative sum for near-identical inputs.
  return std::max(0.0, kl);
}

KLResult kl_divergence(const SplitHistogram& p, const SplitHistogram& q,
                       double smoothing) {
  if (p.bin_edges != q.bin_edges)
    throw Error(ErrorCode::BinMismatch, "histograms have different bin edges");
  if (!(smoothing >= 0.0))
    throw Error(ErrorCode::InvalidArgument, "smoothing must be >= 0");
  KLResult r;
  r.value = kl_from_counts(p.counts, p.n, q.counts, q.n, smoothing);
  r.bins = p.bins();
  r.smoothing = smoothing;
  return r;
}

std::vector<KLResult> split_divergence(const Dataset& dataset,
                                       const std::string& reference_split,
                                       const std::vector<std::string>& other_splits,
                                       std::size_t bins, double smoothing) {
  auto hist_of = [&](const std::string& name) {
    auto profiles = profile_split(dataset.split(name));
    return histogram(change_percentages(profiles), bins);
  };
  const SplitHistogram reference = hist_of(reference_split);
  std::vector<KLResult> results;
  for (const auto& other : other_splits) {
    KLResult r = kl_divergence(reference, hist_of(other), smoothing);
    r.p_name = reference_split;
    r.q_name = other;
    results.push_back(std::move(r));
  }
  return results;
}

namespace {

void check_perm_inputs(std::span<const double> a, std::span<const double> b,
                       const PermTestOptions& options) {
  if (a.empty() || b.empty())
    throw Error(ErrorCode::EmptyInput, "permutation test needs two non-empty samples");
  if (options.iterations < 1)
    throw Error(ErrorCode::InvalidArgument, "iterations must be >= 1");
  check_bins(options.bins);
  if (!(options.smoothing >= 0.0))
    throw Error(ErrorCode::InvalidArgument, "smoothing must be >= 0");
}

double observed_kl(std::span<const double> a, std::span<const double> b,
                   const PermTestOptions& options) {
  return kl_divergence(histogram(a, options.bins), histogram(b, options.bins),
                       options.smoothing)
      .value;
}

PermTestResult finish(double observed, std::size_t count_geq, double max_kl,
                      const PermTestOptions& options) {
  PermTestResult r;
  r.observed_kl = observed;
  r.iterations = options.iterations;
  r.count_geq = count_geq;
  r.p_value = static_cast<double>(count_geq) / static_cast<double>(options.iterations);
  r.seed = options.seed;
  r.bins = options.bins;
  r.smoothing = options.smoothing;
  r.max_permuted_kl = max_kl;
  return r;
}

}  // namespace

PermTestResult permutation_test_serial(std::span<const double> values_a,
                                       std::span<const double> values_b,
                                       const PermTestOptions& options) {
  check_perm_inputs(values_a, values_b, options);
  const double observed = observed_kl(values_a, values_b, options);

  std::vector<double> pool(values_a.begin(), values_a.end());
  pool.insert(pool.end(), values_b.begin(), values_b.end());
  const std::size_t na = values_a.size();

  std::size_t count_geq = 0;
  double max_kl = 0.0;
  std::vector<double> shuffled;
  for (std::size_t it = 0; it < options.iterations; ++it) {
    shuffled = pool;
    rng::Xoshiro256 gen(rng::derive_stream_seed(options.seed, it));
    rng::shuffle(std::span<double>(shuffled), gen);
    std::span<const double> view(shuffled);
    const double kl = kl_divergence(histogram(view.first(na), options.bins),
                                    histogram(view.subspan(na), options.bins),
                                    options.smoothing)
                          .value;
    if (kl >= observed) ++count_geq;
    max_kl = std::max(max_kl, kl);
  }
  return finish(observed, count_geq, max_kl, options);
}

PermTestResult permutation_test(std::span<const double> values_a,
                                std::span<const double> values_b,
                                const PermTestOptions& options) {
  check_perm_inputs(values_a, values_b, options);
  const double observed = observed_kl(values_a, values_b, options);

  // Shuffle bin labels instead of values; the permutation is the same.
  const std::size_t bins = options.bins;
  std::vector<std::uint32_t> pool;
  pool.reserve(values_a.size() + values_b.size());
  for (double v : values_a) pool.push_back(static_cast<std::uint32_t>(bin_index(v, bins)));
  for (double v : values_b) pool.push_back(static_cast<std::uint32_t>(bin_index(v, bins)));
  std::vector<std::size_t> total(bins, 0);
  for (auto b : pool) ++total[b];

  const std::size_t na = values_a.size();
  const std::size_t nb = values_b.size();
  const auto iterations = static_cast<std::ptrdiff_t>(options.iterations);
  std::size_t count_geq = 0;
  double max_kl = 0.0;

#pragma omp parallel reduction(+ : count_geq) reduction(max : max_kl)
  {
    std::vector<std::uint32_t> shuffled(pool.size());
    std::vector<std::size_t> counts_a(bins), counts_b(bins);
#pragma omp for schedule(static)
    for (std::ptrdiff_t it = 0; it < iterations; ++it) {
      std::copy(pool.begin(), pool.end(), shuffled.begin());
      rng::Xoshiro256 gen(
          rng::derive_stream_seed(options.seed, static_cast<std::uint64_t>(it)));
      rng::shuffle(std::span<std::uint32_t>(shuffled), gen);
      std::fill(counts_a.begin(), counts_a.end(), 0);
      for (std::size_t k = 0; k < na; ++k) ++counts_a[shuffled[k]];
      for (std::size_t b = 0; b < bins; ++b) counts_b[b] = total[b] - counts_a[b];
      const double kl = kl_from_counts(counts_a, na, counts_b, nb, options.smoothing);
      if (kl >= observed) ++count_geq;
      max_kl = std::max(max_kl, kl);
    }
  }
  return finish(observed, count_geq, max_kl, options);
}

bool decide_null(const PermTestResult& result, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
  return result.p_value < alpha;
}

namespace {

std::vector<double> paired_diffs(std::span<const double> a, std::span<const double> b) {
  if (a.empty()) throw Error(ErrorCode::EmptyInput, "paired test of no scores");
  if (a.size() != b.size())
    throw Error(ErrorCode::LengthMismatch, "paired test needs equal-length score lists");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// |mean of randomly sign-flipped differences| for one iteration.
double flipped_statistic(std::span<const double> diffs, std::uint64_t seed,
                         std::uint64_t iteration) {
  rng::Xoshiro256 gen(rng::derive_stream_seed(seed, iteration));
  double sum = 0.0;
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    if (i % 64 == 0) bits = gen();
    sum += (bits & 1u) ? -diffs[i] : diffs[i];
    bits >>= 1;
  }
  return std::abs(sum / static_cast<double>(diffs.size()));
}

PairedPermResult paired_base(std::span<const double> a, std::span<const double> b,
                             std::span<const double> diffs, std::size_t iterations,
                             std::uint64_t seed) {
  if (iterations < 1) throw Error(ErrorCode::InvalidArgument, "iterations must be >= 1");
  PairedPermResult r;
  r.mean_a = mean_of(a);
  r.mean_b = mean_of(b);
  r.observed = std::abs(mean_of(diffs));
  r.iterations = iterations;
  r.seed = seed;
  return r;
}

}  // namespace

PairedPermResult paired_permutation_test_serial(std::span<const double> scores_a,
                                                std::span<const double> scores_b,
                                                std::size_t iterations,
                                                std::uint64_t seed) {
  const auto diffs = paired_diffs(scores_a, scores_b);
  auto r = paired_base(scores_a, scores_b, diffs, iterations, seed);
  for (std::size_t it = 0; it < iterations; ++it)
    if (flipped_statistic(diffs, seed, it) >= r.observed) ++r.count_geq;
  r.p_value = static_cast<double>(r.count_geq) / static_cast<double>(iterations);
  return r;
}

PairedPermResult paired_permutation_test(std::span<const double> scores_a,
                                         std::span<const double> scores_b,
                                         std::size_t iterations, std::uint64_t seed) {
  const auto diffs = paired_diffs(scores_a, scores_b);
  auto r = paired_base(scores_a, scores_b, diffs, iterations, seed);
  const double observed = r.observed;
  std::size_t count_geq = 0;
  const auto n = static_cast<std::ptrdiff_t>(iterations);
#pragma omp parallel for reduction(+ : count_geq) schedule(static)
  for (std::ptrdiff_t it = 0; it < n; ++it)
    if (flipped_statistic(diffs, seed, static_cast<std::uint64_t>(it)) >= observed)
      ++count_geq;
  r.count_geq = count_geq;
  r.p_value = static_cast<double>(count_geq) / static_cast<double>(iterations);
  return r;
}

void write_histogram_csv(std::ostream& out, const SplitHistogram& hist) {
  out << "bin_left,bin_right,count,mass\n";
  for (std::size_t i = 0; i < hist.bins(); ++i)
    out << format_double(hist.bin_edges[i], 6) << ','
        << format_double(hist.bin_edges[i + 1], 6) << ',' << hist.counts[i] << ','
        << format_double(hist.mass[i], 12) << '\n';
}

}  // namespace tsdiag
